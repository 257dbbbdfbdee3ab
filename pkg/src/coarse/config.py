"""Job configuration: a line-oriented ``section.key = value`` format.

See docs/config.ebnf for the grammar. Parsing resolves every name, so a
JobConfig handed to the runner never contains a dangling reference.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import coarse_logic as cl
from . import subspaces as sb
from .errors import CoarseError, ConfigSyntaxError, ParamOutOfRange, UnknownName
from .snf import AbelianGroupFG
from .spaces import CayleySpace, GridSpace, build_space

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<string>"[^"]*")
  | (?P<num>\d+(?:/\d+)?)
  | (?P<op>>=|<=|->|\.\.|[(),:;|+\-*])
  | (?P<name>[A-Za-z_][A-Za-z0-9_\-]*)
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str
    text: str
    col: int


def tokenize(text, line, col0):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ConfigSyntaxError(f"unexpected character {text[pos]!r}", line, col0 + pos)
        if m.lastgroup != "ws":
            out.append(Token(m.lastgroup, m.group(), col0 + pos))
        pos = m.end()
    return out


class _Cursor:
    def __init__(self, tokens, line, end_col):
        self.tokens = tokens
        self.i = 0
        self.line = line
        self.end_col = end_col

    def peek(self, offset=0):
        j = self.i + offset
        return self.tokens[j] if j < len(self.tokens) else None

    def at(self, text):
        t = self.peek()
        return t is not None and t.text == text

    def error(self, message):
        t = self.peek()
        return ConfigSyntaxError(message, self.line, t.col if t else self.end_col)

    def take(self, text=None, kind=None):
        t = self.peek()
        if t is None:
            raise self.error(f"expected {text or kind}, found end of line")
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            raise self.error(f"expected {text or kind}, found {t.text!r}")
        self.i += 1
        return t

    def accept(self, text):
        if self.at(text):
            self.i += 1
            return True
        return False

    def done(self):
        return self.i >= len(self.tokens)

    def expect_end(self):
        if not self.done():
            raise self.error(f"unexpected {self.peek().text!r}")


# ---------------------------------------------------------------------------
# Values
# ---------------------------------------------------------------------------


def _number(cur, signed=True):
    neg = signed and cur.accept("-")
    t = cur.take(kind="num")
    v = Fraction(t.text)
    v = -v if neg else v
    return int(v) if v.denominator == 1 else v


def _int(cur):
    v = _number(cur)
    if not isinstance(v, int):
        raise cur.error("expected an integer")
    return v


def _point(cur):
    """An integer, a tuple of integers, or a quoted group word."""
    t = cur.peek()
    if t is None:
        raise cur.error("expected a point")
    if t.kind == "string":
        cur.i += 1
        return t.text[1:-1]
    if cur.accept("("):
        vals = [_int(cur)]
        while cur.accept(","):
            vals.append(_int(cur))
        cur.take(")")
        return tuple(vals)
    return _int(cur)


def _int_list(cur):
    vals = [_int(cur)]
    while cur.accept(","):
        vals.append(_int(cur))
    return vals


# ---------------------------------------------------------------------------
# Subspace expressions
# ---------------------------------------------------------------------------


def _sign(cur):
    t = cur.take()
    if t.text not in ("+", "-", "*"):
        raise ConfigSyntaxError(f"expected a sign, found {t.text!r}", cur.line, t.col)
    return t.text


def _args(cur, parse_one):
    cur.take("(")
    out = []
    if not cur.at(")"):
        out.append(parse_one(cur))
        while cur.accept(","):
            out.append(parse_one(cur))
    cur.take(")")
    return out


class SubspaceParser:
    def __init__(self, names):
        self.names = names

    def parse(self, cur):
        t = cur.take(kind="name")
        word = t.text
        if not cur.at("("):
            if word == "all":
                return sb.All()
            if word not in self.names:
                raise UnknownName(word)
            return self.names[word]
        handler = getattr(self, "_" + word.replace("-", "_"), None)
        if handler is None:
            raise ConfigSyntaxError(f"unknown subspace constructor {word!r}", cur.line, t.col)
        return handler(cur)

    def _union(self, cur):
        return sb.Union(tuple(_args(cur, self.parse)))

    def _inter(self, cur):
        return sb.Intersection(tuple(_args(cur, self.parse)))

    def _compl(self, cur):
        (inner,) = _args(cur, self.parse)
        return sb.Complement(inner)

    def _ray(self, cur):
        cur.take("(")
        if cur.at("+") or cur.at("-"):
            d = cur.take().text
            if cur.at("(") or (cur.peek() is not None and cur.peek().kind == "string"):
                p = _point(cur)
                d = p if d == "+" else ("-" + p if isinstance(p, str) else tuple(-c for c in p))
        else:
            d = _point(cur)
        cur.take(")")
        return sb.Ray(d)

    def _sector(self, cur):
        return sb.Sector(tuple(_args(cur, _sign)))

    def _orthant(self, cur):
        return self._sector(cur)

    def _signcone(self, cur):
        cur.take("(")
        signs = [_sign(cur)]
        while cur.accept(","):
            signs.append(_sign(cur))
        spread = _int(cur) if cur.accept(";") else 3
        cur.take(")")
        return sb.SignCone(tuple(signs), spread)

    def _cone(self, cur):
        lo, hi = _args(cur, _number)
        return sb.Cone2.from_angles(lo, hi)

    def _halfspace(self, cur):
        cur.take("(")
        a = _int_list(cur)
        cur.take(">=")
        c = _int(cur)
        cur.take(")")
        return sb.HalfSpace(tuple(a), c)

    def _blocks(self, cur):
        cur.take("(")
        if cur.accept("geom"):
            kw = {"q": _number(cur, signed=False)}
            while cur.peek() is not None and cur.peek().kind == "name":
                key = cur.take().text
                if key not in ("period", "phase", "lo", "hi"):
                    raise ConfigSyntaxError(f"unknown blocks option {key!r}", cur.line, cur.tokens[cur.i - 1].col)
                kw[key] = _number(cur, signed=False)
            cur.take(")")
            kw["lo"] = Fraction(kw.get("lo", 1))
            kw["hi"] = Fraction(kw.get("hi", 1))
            return sb.BlockUnion(**kw)
        intervals = []
        while True:
            a = _int(cur)
            cur.take("..")
            b = _int(cur) if cur.peek() is not None and cur.peek().kind == "num" else None
            intervals.append((a, b))
            if not cur.accept(","):
                break
        cur.take(")")
        return sb.BlockUnion(tuple(intervals))

    def _points(self, cur):
        return sb.Points(_args(cur, _point))

    def _ball(self, cur):
        (r,) = _args(cur, _int)
        return sb.Ball(r)

    def _residue(self, cur):
        vals = _args(cur, _int)
        return sb.Residue(*vals)

    def _thicken(self, cur):
        cur.take("(")
        inner = self.parse(cur)
        cur.take(",")
        r = _int(cur)
        cur.take(")")
        return sb.Thickened(inner, r)

    def _part(self, cur):
        cur.take("(")
        side = _int(cur)
        inner = self.parse(cur) if cur.accept(",") else None
        cur.take(")")
        return sb.Part(side, inner)

    def _factor(self, cur):
        cur.take("(")
        side = _int(cur)
        cur.take(",")
        inner = self.parse(cur)
        cur.take(")")
        return sb.Factor(side, inner)


# ---------------------------------------------------------------------------
# Maps
# ---------------------------------------------------------------------------


def _grid_fn(space, f):
    """Lift an (N, n) -> (N, n) array function to lists of points."""

    def fn(points):
        if not points:
            return []
        arr = f(space.as_array(points))
        return arr[:, 0].tolist() if arr.shape[1] == 1 else list(map(tuple, arr.tolist()))

    return fn


def _tuple_or_int(cur):
    p = _point(cur)
    return p if isinstance(p, tuple) else (p,)


class MapParser:
    def __init__(self, space, subspaces, maps):
        self.space = space
        self.subspaces = subspaces
        self.maps = maps

    def _need_grid(self, cur, what):
        if not isinstance(self.space, GridSpace):
            raise cur.error(f"{what} maps need a grid space")

    def parse(self, cur, name):
        t = cur.take(kind="name")
        word = t.text
        space = self.space
        if word == "identity":
            return cl.identity_map(space)
        if word == "norm":
            zplus = build_space("zplus")
            zplus.max_window = max(zplus.max_window, space.max_window)
            return cl.MapTable(space, zplus, lambda xs: space.norms(xs).tolist(), name=name)
        if word in self.maps and not cur.at("("):
            return self.maps[word]
        if word == "scale":
            self._need_grid(cur, "scale")
            (k,) = _args(cur, _int)
            return cl.MapTable(space, space, _grid_fn(space, lambda a: k * a), name=name)
        if word == "shift":
            self._need_grid(cur, "shift")
            (v,) = _args(cur, _tuple_or_int)
            vec = np.asarray(v, dtype=np.int64)
            if len(vec) != space.n:
                raise cur.error("shift vector has the wrong dimension")
            return cl.MapTable(space, space, _grid_fn(space, lambda a: a + vec[None, :]), name=name)
        if word == "affine":
            self._need_grid(cur, "affine")
            cur.take("(")
            rows = [_tuple_or_int(cur)]
            while cur.accept(","):
                rows.append(_tuple_or_int(cur))
            cur.take(";")
            off = _tuple_or_int(cur)
            cur.take(")")
            A = np.asarray(rows, dtype=np.int64)
            b = np.asarray(off, dtype=np.int64)
            if A.shape != (space.n, space.n) or b.shape != (space.n,):
                raise cur.error("affine map has the wrong shape")
            return cl.MapTable(space, space, _grid_fn(space, lambda a: a @ A.T + b[None, :]), name=name)
        if word == "const":
            (p,) = _args(cur, _point)
            return cl.MapTable(space, space, lambda xs: [p] * len(xs), name=name)
        if word == "include":
            cur.take("(")
            sub = SubspaceParser(self.subspaces).parse(cur)
            cur.take(")")
            return cl.MapTable(space, space, lambda xs: list(xs), domain_subspace=sub, name=name)
        if word == "rmul":
            if not isinstance(space, CayleySpace):
                raise cur.error("rmul needs a group space")
            (w,) = _args(cur, _point)
            w = space.reduce(str(w))
            return cl.MapTable(space, space, lambda xs: [space.multiply(x, w) for x in xs], name=name)
        if word in self.maps:
            return self.maps[word]
        raise UnknownName(word)


# ---------------------------------------------------------------------------
# Config
# ---------------------------------------------------------------------------


@dataclass
class Params:
    window: int = 64
    scales: tuple = (1, 2)
    r_range: tuple = (1, 2)
    n_range: tuple = ()
    cap: int = 64
    coeff: AbelianGroupFG = field(default_factory=lambda: AbelianGroupFG(1))
    horizon: int = 0
    samples: int = 2000


@dataclass
class Command:
    index: int
    label: str
    verb: str
    text: str
    line: int
    args: dict


@dataclass
class JobConfig:
    space: object
    space_text: str
    subspaces: dict
    maps: dict
    params: Params
    commands: list


_KEY = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\.([A-Za-z0-9_\-]+))?$")

VERBS = (
    "ends", "bounded", "coentourage", "cover", "shift-cover", "refine", "close", "coarse-map",
    "surjective", "flasque", "sections", "cohomology", "mayer-vietoris", "compare", "metric-check",
)


ALIASES = {"cover-check": "cover", "flasque-check": "flasque", "ends-check": "ends"}


def _split_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if "=" not in line:
            raise ConfigSyntaxError("expected 'key = value'", lineno, len(raw.lstrip()) and raw.index(raw.lstrip()[0]) + 1)
        eq = line.index("=")
        key = line[:eq].strip()
        value = line[eq + 1:]
        vcol = eq + 2 + (len(value) - len(value.lstrip()))
        yield lineno, raw.index(key[0]) + 1 if key else 1, key, value.strip(), vcol


def _parse_ints(text, line, col):
    cur = _Cursor(tokenize(text, line, col), line, col + len(text))
    vals = _int_list(cur)
    cur.expect_end()
    return tuple(vals)


def parse_config(text, window=None):
    """Parse and resolve a job configuration."""
    space_keys = {}
    space_line = None
    subspace_lines = []
    map_lines = []
    param_lines = []
    run_lines = []
    for lineno, kcol, key, value, vcol in _split_lines(text):
        m = _KEY.match(key)
        if not m:
            raise ConfigSyntaxError(f"malformed key {key!r}", lineno, kcol)
        section, name = m.group(1), m.group(2)
        if section == "space":
            if name is None:
                space_line = (lineno, vcol, value)
            else:
                space_keys[name] = (lineno, vcol, value)
        elif section == "subspace" and name:
            subspace_lines.append((lineno, vcol, name, value))
        elif section == "map" and name:
            map_lines.append((lineno, vcol, name, value))
        elif section == "params" and name:
            param_lines.append((lineno, vcol, name, value, kcol + len(section) + 1))
        elif section == "run" and name:
            run_lines.append((lineno, vcol, name, value))
        elif section == "format":
            continue
        else:
            raise ConfigSyntaxError(f"unknown section {key!r}", lineno, kcol)

    space = _build_space(space_line, space_keys)
    params = _build_params(param_lines, space, window)

    subspaces = {}
    sp = SubspaceParser(subspaces)
    for lineno, vcol, name, value in subspace_lines:
        cur = _Cursor(tokenize(value, lineno, vcol), lineno, vcol + len(value))
        subspaces[name] = sp.parse(cur)
        cur.expect_end()

    maps = {}
    mp = MapParser(space, subspaces, maps)
    for lineno, vcol, name, value in map_lines:
        cur = _Cursor(tokenize(value, lineno, vcol), lineno, vcol + len(value))
        maps[name] = mp.parse(cur, name)
        cur.expect_end()

    commands = []
    for k, (lineno, vcol, label, value) in enumerate(run_lines, start=1):
        commands.append(_parse_command(k, label, value, lineno, vcol, subspaces, maps, space))
    return JobConfig(space, space.describe(), subspaces, maps, params, commands)


def _build_space(space_line, keys):
    if space_line is None and "kind" not in keys:
        raise ConfigSyntaxError("missing space.kind", 1, 1)
    try:
        if space_line is not None:
            lineno, vcol, value = space_line
            space = build_space(value)
        else:
            lineno, vcol, _ = keys["kind"]
            spec = {k: v[2] for k, v in keys.items()}
            for k in ("n", "k", "max_window", "m", "basepoint"):
                if k in spec:
                    spec[k] = int(spec[k])
            if "distances" in spec:
                spec["distances"] = [[int(x) for x in row.split()] for row in spec["distances"].split(";")]
            space = build_space(spec)
        if "max_window" in keys and space_line is not None:
            space.max_window = int(keys["max_window"][2])
    except (ValueError, KeyError) as exc:
        raise ConfigSyntaxError(f"bad space description: {exc}", lineno, vcol) from None
    return space


def _build_params(lines, space, window):
    p = Params()
    for lineno, vcol, name, value, ncol in lines:
        if name in ("window", "cap", "horizon", "samples"):
            (v,) = _parse_ints(value, lineno, vcol)
            setattr(p, name, v)
        elif name in ("scales", "r_range", "n_range"):
            setattr(p, name, _parse_ints(value, lineno, vcol))
        elif name == "coeff":
            try:
                p.coeff = AbelianGroupFG.parse(value)
            except ValueError as exc:
                raise ConfigSyntaxError(str(exc), lineno, vcol) from None
        else:
            raise ConfigSyntaxError(f"unknown parameter {name!r}", lineno, ncol)
    if window is not None:
        p.window = int(window)
    if not 0 < p.window <= space.max_window:
        raise ParamOutOfRange(f"window {p.window} must lie in 1..{space.max_window} for {space.describe()}")
    try:
        cl.ScaleSchedule(p.scales)
    except CoarseError as exc:
        raise ParamOutOfRange(str(exc)) from None
    if 4 * max(p.scales) > p.window:
        raise ParamOutOfRange(f"largest scale {max(p.scales)} exceeds window/4 = {p.window // 4}")
    if p.cap < 1:
        raise ParamOutOfRange("cap must be positive")
    if not p.horizon:
        p.horizon = max(1, p.window // 4)
    return p


def _subspace_list(cur, sp, stop=()):
    out = []
    if cur.done() or any(cur.at(s) for s in stop):
        return out
    out.append(sp.parse(cur))
    while cur.accept(","):
        out.append(sp.parse(cur))
    return out


def _pair_expr(cur, sp, maps):
    t = cur.take(kind="name")
    word = t.text
    if word == "square":
        (U,) = _args(cur, sp.parse)
        return cl.Square(U)
    if word == "cross":
        U, V = _args(cur, sp.parse)
        return cl.Cross(U, V)
    if word == "graph":
        cur.take("(")
        name = cur.take(kind="name").text
        cur.take(")")
        if name not in maps:
            raise UnknownName(name)
        return cl.GraphOf(maps[name])
    if word == "defect":
        cur.take("(")
        target = sp.parse(cur)
        cur.take(":")
        family = _subspace_list(cur, sp, stop=(")",))
        cur.take(")")
        return cl.CoverDefect(target, tuple(family))
    if word == "union":
        return cl.PairUnion(tuple(_args(cur, lambda c: _pair_expr(c, sp, maps))))
    if word == "inter":
        return cl.PairIntersection(tuple(_args(cur, lambda c: _pair_expr(c, sp, maps))))
    if word == "compl":
        (inner,) = _args(cur, lambda c: _pair_expr(c, sp, maps))
        return cl.PairComplement(inner)
    raise ConfigSyntaxError(f"unknown pair constructor {word!r}", cur.line, t.col)


def _map_name(cur, maps, space):
    name = cur.take(kind="name").text
    if name == "identity" and name not in maps:
        return cl.identity_map(space)
    if name not in maps:
        raise UnknownName(name)
    return maps[name]


def _parse_command(index, label, value, lineno, vcol, subspaces, maps, space):
    cur = _Cursor(tokenize(value, lineno, vcol), lineno, vcol + len(value))
    t = cur.take(kind="name")
    verb = ALIASES.get(t.text, t.text)
    if verb not in VERBS:
        raise ConfigSyntaxError(f"unknown command {verb!r}", lineno, t.col)
    sp = SubspaceParser(subspaces)
    args = {}
    if verb in ("ends", "bounded", "sections"):
        args["U"] = sp.parse(cur) if not cur.done() else sb.All()
    elif verb == "coentourage":
        args["C"] = _pair_expr(cur, sp, maps)
    elif verb in ("cover", "cohomology"):
        args["target"] = sp.parse(cur)
        cur.take(":")
        args["family"] = _subspace_list(cur, sp)
    elif verb == "shift-cover":
        args["r"] = _int(cur)
        args["target"] = sp.parse(cur)
        cur.take(":")
        args["family"] = _subspace_list(cur, sp)
    elif verb == "refine":
        args["fine"] = _subspace_list(cur, sp, stop=("->",))
        cur.take("->")
        args["coarse"] = _subspace_list(cur, sp)
    elif verb == "compare":
        args["target"] = sp.parse(cur)
        cur.take(":")
        args["fine"] = _subspace_list(cur, sp, stop=("->",))
        cur.take("->")
        args["coarse"] = _subspace_list(cur, sp)
    elif verb == "mayer-vietoris":
        args["target"] = sp.parse(cur)
        cur.take(":")
        args["A"] = sp.parse(cur)
        cur.take(",")
        args["B"] = sp.parse(cur)
        args["cover"] = _subspace_list(cur, sp) if cur.accept("|") else None
    elif verb == "close":
        args["f"] = _map_name(cur, maps, space)
        args["g"] = _map_name(cur, maps, space)
    elif verb in ("coarse-map", "surjective", "flasque"):
        args["f"] = _map_name(cur, maps, space)
    cur.expect_end()
    return Command(index, label, verb, value, lineno, args)
