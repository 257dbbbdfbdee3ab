"""Proper metric spaces presented through finite balls around a basepoint.

Every space enumerates its points shell by shell: first by distance to the
basepoint, then by a tie-break key that does not depend on the ball radius.
A point's id is its position in that enumeration, so ``window(W1)`` is a
prefix of ``window(W2)`` for ``W1 <= W2`` and ids never move.
"""

from __future__ import annotations

import itertools
import re
from functools import cached_property

import numpy as np
from scipy import ndimage

from .errors import InvalidParameter, UnknownKind, WindowTooLarge
from .unionfind import UnionFind, canonical_labels


def outer_shell_start(W):
    """Largest radius that is *not* in the outer quarter shell of window W."""
    return (3 * W) // 4


def probe_windows(W):
    return (W // 2, (3 * W) // 4, W)


class Window:
    """The finite ball ``{x : d(x, base) <= W}`` of a space."""

    def __init__(self, space, W, points, radius, array=None):
        self.space = space
        self.W = W
        self.points = points
        self.radius = np.asarray(radius, dtype=np.int64)
        self.array = array
        self.cache = {}

    def __len__(self):
        return len(self.points)

    def __repr__(self):
        return f"Window({self.space.describe()}, W={self.W}, size={len(self)})"

    @cached_property
    def index(self):
        return {p: i for i, p in enumerate(self.points)}

    def id_of(self, point):
        try:
            return self.index[point]
        except KeyError:
            raise KeyError(f"{point!r} is not in the window of radius {self.W}") from None

    def prefix(self, W):
        """Number of points of radius <= W (they are the first ones)."""
        return int(np.searchsorted(self.radius, W, side="right"))

    @cached_property
    def shell(self):
        return self.radius > outer_shell_start(self.W)


class SpacePresentation:
    """A countable proper metric space with a basepoint.

    Subclasses provide ``distance``, ``contains`` and ``_build_window``; the
    generic pair enumeration, component labelling and dilation below work for
    any of them but are quadratic, so the concrete spaces override them.
    """

    kind = "abstract"

    def __init__(self, max_window):
        if max_window < 0:
            raise InvalidParameter("max_window must be nonnegative")
        self.max_window = int(max_window)
        self._windows = {}

    # -- metric ------------------------------------------------------------
    basepoint = None

    def distance(self, x, y):
        raise NotImplementedError

    def norm(self, x):
        return self.distance(x, self.basepoint)

    def contains(self, x):
        raise NotImplementedError

    def in_entourage(self, r, x, y):
        return self.distance(x, y) <= r

    def distances(self, xs, ys):
        return np.fromiter((self.distance(x, y) for x, y in zip(xs, ys)), np.int64, len(xs))

    def norms(self, xs):
        return self.distances(xs, [self.basepoint] * len(xs))

    def pair_distances(self, window, I, J):
        pts = window.points
        return self.distances([pts[i] for i in I], [pts[j] for j in J])

    def describe(self):
        return self.kind

    # -- windows -----------------------------------------------------------
    def window(self, W):
        W = int(W)
        if W < 0:
            raise InvalidParameter("window radius must be nonnegative")
        if W > self.max_window:
            raise WindowTooLarge(f"window {W} exceeds max_window {self.max_window} of {self.describe()}")
        win = self._windows.get(W)
        if win is None:
            win = self._build_window(W)
            self._windows[W] = win
        return win

    def window_points(self, W):
        return list(self.window(W).points)

    def _build_window(self, W):
        raise NotImplementedError

    # -- adjacency ---------------------------------------------------------
    def pair_chunks(self, window, r):
        """Yield ``(I, J)`` id arrays covering every unordered pair with 0 < d <= r once."""
        n = len(window)
        pts = window.points
        for i in range(n):
            row = np.fromiter((self.distance(pts[i], pts[j]) for j in range(i + 1, n)), np.int64, n - i - 1)
            J = np.flatnonzero(row <= r) + i + 1
            if len(J):
                yield np.full(len(J), i, dtype=np.int64), J

    def components(self, window, mask, r):
        """Label the connected components of ``mask`` under the relation d <= r."""
        mask = np.asarray(mask, dtype=bool)
        uf = UnionFind(len(window))
        for I, J in self.pair_chunks(window, r):
            keep = mask[I] & mask[J]
            uf.union_pairs(I[keep], J[keep])
        return canonical_labels(uf.roots(), mask)

    def dilate(self, window, mask, r):
        """Points of the window within distance r of some masked point."""
        mask = np.asarray(mask, dtype=bool)
        out = mask.copy()
        if r <= 0:
            return out
        for I, J in self.pair_chunks(window, r):
            out[I[mask[J]]] = True
            out[J[mask[I]]] = True
        return out


# ---------------------------------------------------------------------------
# Z^n and Z_+
# ---------------------------------------------------------------------------

_DEFAULT_GRID_WINDOW = {1: 4096, 2: 256, 3: 48}


class GridSpace(SpacePresentation):
    """Z^n with the l-infinity or l1 metric; ``nonneg`` gives Z_+ (n = 1)."""

    def __init__(self, n=1, metric="linf", nonneg=False, max_window=None):
        if n < 1:
            raise InvalidParameter("dimension n must be >= 1")
        if metric not in ("linf", "l1"):
            raise InvalidParameter(f"unknown metric {metric!r}")
        if nonneg and n != 1:
            raise InvalidParameter("only Z_+ (n = 1) is supported as a nonnegative grid")
        self.n = n
        self.metric = metric
        self.nonneg = nonneg
        self.kind = "zplus" if nonneg else "zn"
        super().__init__(_DEFAULT_GRID_WINDOW.get(n, 16) if max_window is None else max_window)
        self.basepoint = 0 if n == 1 else (0,) * n

    def describe(self):
        if self.nonneg:
            return "zplus"
        return f"zn({self.n},{self.metric})"

    def as_array(self, xs):
        return np.asarray(xs, dtype=np.int64).reshape(-1, self.n)

    def _norm_rows(self, a):
        a = np.abs(a)
        return a.max(axis=1) if self.metric == "linf" else a.sum(axis=1)

    def distance(self, x, y):
        d = np.abs(np.subtract(x, y, dtype=np.int64)).reshape(-1)
        return int(d.max() if self.metric == "linf" else d.sum())

    def distances(self, xs, ys):
        if len(xs) == 0:
            return np.zeros(0, dtype=np.int64)
        return self._norm_rows(self.as_array(xs) - self.as_array(ys))

    def pair_distances(self, window, I, J):
        return self._norm_rows(window.array[I] - window.array[J])

    def contains(self, x):
        if self.n == 1:
            ok = isinstance(x, (int, np.integer)) and not isinstance(x, bool)
            return ok and (x >= 0 or not self.nonneg)
        return isinstance(x, tuple) and len(x) == self.n and all(isinstance(c, (int, np.integer)) for c in x)

    def _to_points(self, arr):
        if self.n == 1:
            return arr[:, 0].tolist()
        return list(map(tuple, arr.tolist()))

    def _build_window(self, W):
        lo = 0 if self.nonneg else -W
        side = W - lo + 1
        axes = [np.arange(lo, W + 1, dtype=np.int64)] * self.n
        cube = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.n)
        rad = self._norm_rows(cube)
        keep = np.flatnonzero(rad <= W)
        keys = [cube[keep, k] for k in reversed(range(self.n))] + [rad[keep]]
        order = keep[np.lexsort(keys)]
        arr = cube[order]
        grid = np.full((side,) * self.n, -1, dtype=np.int64)
        grid.reshape(-1)[order] = np.arange(len(order))
        win = Window(self, W, self._to_points(arr), rad[order], array=arr)
        win.grid = grid
        win.cells = order
        win.lo = lo
        return win

    def _offsets(self, r, half=True):
        rng = range(-r, r + 1)
        out = []
        for o in itertools.product(rng, repeat=self.n):
            norm = max(map(abs, o)) if self.metric == "linf" else sum(map(abs, o))
            if norm == 0 or norm > r:
                continue
            if half and next(c for c in o if c != 0) < 0:
                continue
            out.append(o)
        return out

    @staticmethod
    def _shift_slices(o, side):
        src, tgt = [], []
        for c in o:
            if c >= 0:
                src.append(slice(0, side - c))
                tgt.append(slice(c, side))
            else:
                src.append(slice(-c, side))
                tgt.append(slice(0, side + c))
        return tuple(src), tuple(tgt)

    def pair_chunks(self, window, r):
        grid = window.grid
        side = grid.shape[0]
        for o in self._offsets(r):
            if max(map(abs, o)) >= side:
                continue
            src, tgt = self._shift_slices(o, side)
            I = grid[src].reshape(-1)
            J = grid[tgt].reshape(-1)
            keep = (I >= 0) & (J >= 0)
            if keep.any():
                yield I[keep], J[keep]

    def _grid_mask(self, window, mask):
        g = np.zeros(window.grid.shape, dtype=bool)
        g.reshape(-1)[window.cells[np.asarray(mask, dtype=bool)]] = True
        return g

    def _unit_structure(self):
        return ndimage.generate_binary_structure(self.n, self.n if self.metric == "linf" else 1)

    def components(self, window, mask, r):
        mask = np.asarray(mask, dtype=bool)
        g = self._grid_mask(window, mask)
        if r < 1:
            lab = np.zeros(g.shape, dtype=np.int64)
            lab.reshape(-1)[window.cells[mask]] = np.arange(1, int(mask.sum()) + 1)
            count = int(mask.sum())
        else:
            lab, count = ndimage.label(g, structure=self._unit_structure())
        side = g.shape[0]
        uf = UnionFind(count + 1)
        for o in self._offsets(r):
            norm = max(map(abs, o)) if self.metric == "linf" else sum(map(abs, o))
            if norm <= 1 or max(map(abs, o)) >= side:
                continue
            src, tgt = self._shift_slices(o, side)
            a = lab[src].reshape(-1)
            b = lab[tgt].reshape(-1)
            sel = (a > 0) & (b > 0) & (a != b)
            if sel.any():
                uf.union_pairs(a[sel], b[sel])
        roots = uf.roots()[lab.reshape(-1)[window.cells]]
        return canonical_labels(roots, mask)

    def dilate(self, window, mask, r):
        mask = np.asarray(mask, dtype=bool)
        if r <= 0:
            return mask.copy()
        g = self._grid_mask(window, mask)
        if self.metric == "linf":
            structure = np.ones((2 * r + 1,) * self.n, dtype=bool)
        else:
            structure = ndimage.iterate_structure(self._unit_structure(), r)
        d = ndimage.binary_dilation(g, structure=structure)
        return d.reshape(-1)[window.cells]


# ---------------------------------------------------------------------------
# Groups with word metric
# ---------------------------------------------------------------------------


class CayleySpace(SpacePresentation):
    """A free product of cyclic groups of order 2 and infinity, word metric.

    Elements are reduced words (strings); the identity is ``""``. Letters are
    generators, ``inverse`` maps each letter to its inverse letter (a letter is
    its own inverse for an involution). The metric is d(x, y) = |x^-1 y|.
    """

    def __init__(self, kind, letters, inverse, max_window, label=None):
        self.kind = kind
        self.letters = tuple(letters)
        self.inverse = dict(inverse)
        self._label = label or kind
        super().__init__(max_window)
        self.basepoint = ""

    def describe(self):
        return self._label

    def reduce(self, word):
        out = []
        for c in word:
            if out and self.inverse[out[-1]] == c:
                out.pop()
            else:
                out.append(c)
        return "".join(out)

    def multiply(self, u, v):
        return self.reduce(u + v)

    def invert(self, w):
        return "".join(self.inverse[c] for c in reversed(w))

    def power(self, w, k):
        return self.reduce(w * k) if k >= 0 else self.reduce(self.invert(w) * (-k))

    def distance(self, x, y):
        common = 0
        for a, b in zip(x, y):
            if a != b:
                break
            common += 1
        return len(x) + len(y) - 2 * common

    def contains(self, x):
        return isinstance(x, str) and all(c in self.inverse for c in x) and self.reduce(x) == x

    def _build_window(self, W):
        points = [""]
        sphere = [""]
        radius = [0]
        for k in range(1, W + 1):
            nxt = []
            for w in sphere:
                for c in self.letters:
                    if w and self.inverse[w[-1]] == c:
                        continue
                    nxt.append(w + c)
            sphere = nxt
            points.extend(sphere)
            radius.extend([k] * len(sphere))
        return Window(self, W, points, radius)

    def pair_chunks(self, window, r):
        words = self._build_window(r).points[1:]
        index = window.index
        pts = window.points
        n = len(pts)
        I = np.arange(n, dtype=np.int64)
        for w in words:
            J = np.fromiter((index.get(self.multiply(x, w), -1) for x in pts), np.int64, n)
            keep = J > I
            if keep.any():
                yield I[keep], J[keep]


def free_group(k, max_window=None):
    if k < 2:
        raise InvalidParameter("free_group needs k >= 2 generators")
    letters = []
    inverse = {}
    for i in range(k):
        a = chr(ord("a") + i)
        A = a.upper()
        letters += [a, A]
        inverse[a] = A
        inverse[A] = a
    if max_window is None:
        max_window = 8 if k == 2 else 6
    return CayleySpace("free_group", letters, inverse, max_window, label=f"free_group({k})")


def dihedral_infinity(max_window=4096):
    """<a, b | a^2 = b^2 = 1> with generators {a, b}."""
    return CayleySpace("dihedral_infinity", "ab", {"a": "a", "b": "b"}, max_window)


# ---------------------------------------------------------------------------
# Explicit finite metric spaces
# ---------------------------------------------------------------------------


class ExplicitSpace(SpacePresentation):
    """Points 0..m-1 with a user supplied integer distance table."""

    kind = "explicit"

    def __init__(self, table, basepoint=0, max_window=4096):
        table = [list(map(int, row)) for row in table]
        m = len(table)
        if m == 0:
            raise InvalidParameter("explicit space needs a nonempty distance table")
        if any(len(row) != m for row in table):
            raise InvalidParameter("distance table must be square")
        t = np.array(table, dtype=np.int64)
        if (np.diag(t) != 0).any():
            raise InvalidParameter("distance table must have a zero diagonal")
        if (t != t.T).any():
            raise InvalidParameter("distance table must be symmetric")
        off = t + np.eye(m, dtype=np.int64)
        if (off <= 0).any():
            raise InvalidParameter("distinct points must have positive distance")
        # triangle inequality: t[i,k] <= t[i,j] + t[j,k]
        if (t[:, None, :] > t[:, :, None] + t[None, :, :]).any():
            raise InvalidParameter("distance table violates the triangle inequality")
        if not 0 <= basepoint < m:
            raise InvalidParameter("basepoint out of range")
        self.table = t
        super().__init__(max_window)
        self.basepoint = int(basepoint)

    def describe(self):
        return f"explicit({len(self.table)})"

    def distance(self, x, y):
        return int(self.table[x, y])

    def distances(self, xs, ys):
        return self.table[np.asarray(xs, dtype=np.int64), np.asarray(ys, dtype=np.int64)]

    def pair_distances(self, window, I, J):
        pts = np.asarray(window.points, dtype=np.int64)
        return self.table[pts[I], pts[J]]

    def contains(self, x):
        return isinstance(x, (int, np.integer)) and 0 <= x < len(self.table)

    def _build_window(self, W):
        rad = self.table[self.basepoint]
        pts = [p for p in sorted(range(len(rad)), key=lambda p: (rad[p], p)) if rad[p] <= W]
        return Window(self, W, pts, rad[pts])

    def pair_chunks(self, window, r):
        pts = np.asarray(window.points, dtype=np.int64)
        sub = self.table[np.ix_(pts, pts)]
        I, J = np.nonzero(np.triu((sub <= r) & (sub > 0)))
        if len(I):
            yield I.astype(np.int64), J.astype(np.int64)


# ---------------------------------------------------------------------------
# Constructors: disjoint union and product
# ---------------------------------------------------------------------------


class DisjointUnion(SpacePresentation):
    """Points ``(0, a)`` and ``(1, b)``; cross distance d(a, base) + 1 + d(b, base)."""

    kind = "disjoint_union"

    def __init__(self, left, right, max_window=None):
        self.left = left
        self.right = right
        limit = min(left.max_window, right.max_window + 1)
        super().__init__(limit if max_window is None else min(max_window, limit))
        self.basepoint = (0, left.basepoint)

    def describe(self):
        return f"disjoint_union({self.left.describe()},{self.right.describe()})"

    def _part(self, side):
        return self.left if side == 0 else self.right

    def distance(self, x, y):
        (s, a), (t, b) = x, y
        if s == t:
            return self._part(s).distance(a, b)
        return self._part(s).norm(a) + 1 + self._part(t).norm(b)

    def contains(self, x):
        return isinstance(x, tuple) and len(x) == 2 and x[0] in (0, 1) and self._part(x[0]).contains(x[1])

    def _build_window(self, W):
        lw = self.left.window(W)
        parts = [(0, i, int(lw.radius[i])) for i in range(len(lw))]
        rw = None
        if W >= 1:
            rw = self.right.window(W - 1)
            parts += [(1, j, int(rw.radius[j]) + 1) for j in range(len(rw))]
        parts.sort(key=lambda t: (t[2], t[0], t[1]))
        pts = [(s, (lw if s == 0 else rw).points[i]) for s, i, _ in parts]
        win = Window(self, W, pts, [t[2] for t in parts])
        maps = [np.full(len(lw), -1, dtype=np.int64), np.full(len(rw) if rw else 0, -1, dtype=np.int64)]
        for new, (s, i, _) in enumerate(parts):
            maps[s][i] = new
        win.part_windows = (lw, rw)
        win.part_maps = maps
        return win

    def pair_chunks(self, window, r):
        lw, rw = window.part_windows
        lmap, rmap = window.part_maps
        for I, J in self.left.pair_chunks(lw, r):
            yield lmap[I], lmap[J]
        if rw is None:
            return
        for I, J in self.right.pair_chunks(rw, r):
            yield rmap[I], rmap[J]
        # cross pairs: radius_left(a) + radius_right(b) + 1 <= r
        la = np.flatnonzero(lw.radius <= r - 1)
        rb = np.flatnonzero(rw.radius <= r - 1)
        if len(la) and len(rb):
            A, B = np.meshgrid(la, rb, indexing="ij")
            A, B = A.reshape(-1), B.reshape(-1)
            keep = lw.radius[A] + rw.radius[B] + 1 <= r
            if keep.any():
                yield lmap[A[keep]], rmap[B[keep]]


class Product(SpacePresentation):
    """Pairs ``(a, b)`` with the max metric; E_r is the pullback of both E_r."""

    kind = "product"

    def __init__(self, left, right, max_window=None):
        self.left = left
        self.right = right
        limit = min(left.max_window, right.max_window)
        super().__init__(limit if max_window is None else min(max_window, limit))
        self.basepoint = (left.basepoint, right.basepoint)

    def describe(self):
        return f"product({self.left.describe()},{self.right.describe()})"

    def distance(self, x, y):
        return max(self.left.distance(x[0], y[0]), self.right.distance(x[1], y[1]))

    def distances(self, xs, ys):
        if len(xs) == 0:
            return np.zeros(0, dtype=np.int64)
        dl = self.left.distances([x[0] for x in xs], [y[0] for y in ys])
        dr = self.right.distances([x[1] for x in xs], [y[1] for y in ys])
        return np.maximum(dl, dr)

    def contains(self, x):
        return isinstance(x, tuple) and len(x) == 2 and self.left.contains(x[0]) and self.right.contains(x[1])

    def _build_window(self, W):
        lw, rw = self.left.window(W), self.right.window(W)
        A, B = np.meshgrid(np.arange(len(lw)), np.arange(len(rw)), indexing="ij")
        A, B = A.reshape(-1), B.reshape(-1)
        rad = np.maximum(lw.radius[A], rw.radius[B])
        order = np.lexsort((B, A, rad))
        A, B, rad = A[order], B[order], rad[order]
        pts = [(lw.points[a], rw.points[b]) for a, b in zip(A.tolist(), B.tolist())]
        win = Window(self, W, pts, rad)
        pid = np.empty((len(lw), len(rw)), dtype=np.int64)
        pid[A, B] = np.arange(len(A))
        win.part_windows = (lw, rw)
        win.pid = pid
        return win

    @staticmethod
    def _ordered_pairs(space, window, r):
        n = len(window)
        Is = [np.arange(n, dtype=np.int64)]
        Js = [np.arange(n, dtype=np.int64)]
        for I, J in space.pair_chunks(window, r):
            Is += [I, J]
            Js += [J, I]
        return np.concatenate(Is), np.concatenate(Js)

    def pair_chunks(self, window, r):
        lw, rw = window.part_windows
        pid = window.pid
        LI, LJ = self._ordered_pairs(self.left, lw, r)
        RI, RJ = self._ordered_pairs(self.right, rw, r)
        step = max(1, 2_000_000 // max(1, len(RI)))
        for s in range(0, len(LI), step):
            li, lj = LI[s:s + step, None], LJ[s:s + step, None]
            a = pid[li, RI[None, :]].reshape(-1)
            b = pid[lj, RJ[None, :]].reshape(-1)
            keep = a < b
            if keep.any():
                yield a[keep], b[keep]


# ---------------------------------------------------------------------------
# Descriptors
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*|-?\d+|[(),=])")


def _parse_descriptor(text):
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise InvalidParameter(f"cannot parse space descriptor {text!r} at {pos}")
        tokens.append(m.group(1))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def parse(i):
        name = tokens[i]
        i += 1
        args, kwargs = [], {}
        if i < len(tokens) and tokens[i] == "(":
            i += 1
            while tokens[i] != ")":
                if i + 1 < len(tokens) and tokens[i + 1] == "=":
                    key = tokens[i]
                    val, i = parse(i + 2)
                    kwargs[key] = val
                else:
                    val, i = parse(i)
                    args.append(val)
                if tokens[i] == ",":
                    i += 1
            i += 1
        if not args and not kwargs and re.fullmatch(r"-?\d+", name):
            return int(name), i
        return {"kind": name, "args": args, **kwargs}, i

    node, end = parse(0)
    if end != len(tokens):
        raise InvalidParameter(f"trailing tokens in space descriptor {text!r}")
    return node


def _as_spec(node):
    if isinstance(node, dict) and "args" in node:
        node = dict(node)
        args = node.pop("args")
        kind = node["kind"]
        if kind == "zn":
            for key, val in zip(("n", "metric"), args):
                node.setdefault(key, val["kind"] if isinstance(val, dict) else val)
        elif kind == "free_group" and args:
            node.setdefault("k", args[0])
        elif kind in ("disjoint_union", "product"):
            if len(args) != 2:
                raise InvalidParameter(f"{kind} needs two factors")
            node["left"], node["right"] = args
        elif kind == "explicit_path" and args:
            node.setdefault("m", args[0])
        if isinstance(node.get("metric"), dict):
            node["metric"] = node["metric"]["kind"]
        return node
    return node


def build_space(spec):
    """Build a space from a descriptor dict or string.

    Strings use a call syntax: ``zplus``, ``zn(2, linf)``, ``free_group(2)``,
    ``dihedral_infinity``, ``disjoint_union(zplus, zn(1))``,
    ``product(zplus, zplus)``, ``explicit_path(20)``. Dicts carry ``kind``
    plus the same parameters by name; ``explicit`` takes ``distances``.
    """
    if isinstance(spec, str):
        spec = _parse_descriptor(spec)
    spec = _as_spec(spec)
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InvalidParameter(f"malformed space descriptor {spec!r}")
    kind = spec["kind"]
    mw = spec.get("max_window")
    if kind in ("zplus", "z_plus"):
        return GridSpace(1, nonneg=True, max_window=mw)
    if kind in ("zn", "z"):
        n = int(spec.get("n", 1))
        return GridSpace(n, metric=spec.get("metric", "linf"), max_window=mw)
    if kind == "free_group":
        return free_group(int(spec.get("k", 2)), max_window=mw)
    if kind == "dihedral_infinity":
        return dihedral_infinity(4096 if mw is None else mw)
    if kind == "explicit":
        return ExplicitSpace(spec.get("distances", []), basepoint=int(spec.get("basepoint", 0)),
                             max_window=4096 if mw is None else mw)
    if kind == "explicit_path":
        m = int(spec.get("m", 0))
        if m < 1:
            raise InvalidParameter("explicit_path needs m >= 1 points")
        return ExplicitSpace([[abs(i - j) for j in range(m)] for i in range(m)],
                             max_window=4096 if mw is None else mw)
    if kind == "disjoint_union":
        return DisjointUnion(build_space(spec["left"]), build_space(spec["right"]), max_window=mw)
    if kind == "product":
        return Product(build_space(spec["left"]), build_space(spec["right"]), max_window=mw)
    raise UnknownKind(f"unknown space kind {kind!r}")


def window_points(space, W):
    return space.window_points(W)


def in_entourage(space, r, x, y):
    return space.in_entourage(r, x, y)
