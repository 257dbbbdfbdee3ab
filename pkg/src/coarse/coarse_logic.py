"""Finite-scale verdicts for asymptotic statements about subsets, pairs and maps.

Two kinds of test appear here.

Location tests (coentourages, boundedness, covers) look for violations of a
pointwise condition. They fail when a violation sits in the outer quarter
shell ``3W/4 < |x| <= W``; otherwise they hold, and the bound is the largest
radius of any violation seen.

Value tests (closeness, uniformity, properness, surjectivity) track a
supremum over growing probe windows W/2, 3W/4, W. They hold when the value is
the same on the top two probes, fail when it grows strictly across all three,
and are inconclusive otherwise.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DisagreeingCharacterizations,
    DomainMismatch,
    EmptyFamilyOnUnbounded,
    InvalidParameter,
    IterateEscapesWindow,
    WindowTooSmall,
)
from .spaces import GridSpace, outer_shell_start, probe_windows
from .subspaces import All, Intersection, Subspace, Thickened

MAX_WITNESSES = 16


class Status(enum.Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


_PRECEDENCE = {Status.HOLDS: 0, Status.INCONCLUSIVE: 1, Status.FAILS: 2}


@dataclass(frozen=True)
class Verdict:
    status: Status
    R: int
    W: int
    witness: tuple = ()
    bound: int | None = None
    details: dict = field(default_factory=dict, compare=False)

    @property
    def holds(self):
        return self.status is Status.HOLDS

    @property
    def fails(self):
        return self.status is Status.FAILS


def combine(verdicts, R=None, W=None, details=None):
    """Merge verdicts with precedence Fails > Inconclusive > Holds."""
    verdicts = list(verdicts)
    worst = max(verdicts, key=lambda v: _PRECEDENCE[v.status])
    bounds = [v.bound for v in verdicts if v.bound is not None]
    return Verdict(
        worst.status,
        max(v.R for v in verdicts) if R is None else R,
        worst.W if W is None else W,
        worst.witness,
        max(bounds) if bounds and worst.status is Status.HOLDS else worst.bound,
        details or {},
    )


class ScaleSchedule(tuple):
    """Strictly increasing, nonempty tuple of nonnegative integer scales."""

    def __new__(cls, scales):
        if isinstance(scales, ScaleSchedule):
            return scales
        if isinstance(scales, (int, np.integer)):
            scales = [scales]
        scales = tuple(int(s) for s in scales)
        if not scales:
            raise InvalidParameter("scale schedule must be nonempty")
        if scales[0] < 0 or any(a >= b for a, b in zip(scales, scales[1:])):
            raise InvalidParameter(f"scales must be nonnegative and strictly increasing: {scales}")
        return super().__new__(cls, scales)

    @property
    def max(self):
        return self[-1]


def _require_window(sched, W):
    if W < 4 * sched.max:
        raise WindowTooSmall(f"window {W} is smaller than 4 x the largest scale {sched.max}")


# ---------------------------------------------------------------------------
# Pair predicates
# ---------------------------------------------------------------------------


class PairPredicate:
    """A subset of X^2, evaluated on id arrays ``(I, J)`` of one window."""

    def evaluate(self, window, I, J):
        raise NotImplementedError

    def __or__(self, other):
        return PairUnion((self, other))

    def __and__(self, other):
        return PairIntersection((self, other))

    def __invert__(self):
        return PairComplement(self)


@dataclass(frozen=True)
class Square(PairPredicate):
    U: Subspace

    def evaluate(self, window, I, J):
        m = self.U.mask(window)
        return m[I] & m[J]


@dataclass(frozen=True)
class Cross(PairPredicate):
    U: Subspace
    V: Subspace

    def evaluate(self, window, I, J):
        return self.U.mask(window)[I] & self.V.mask(window)[J]


@dataclass(frozen=True)
class CoverDefect(PairPredicate):
    """target^2 minus the union of the squares U_i^2."""

    target: Subspace
    family: tuple

    def evaluate(self, window, I, J):
        t = self.target.mask(window)
        out = t[I] & t[J]
        for U in self.family:
            m = U.mask(window)
            out &= ~(m[I] & m[J])
        return out


@dataclass(frozen=True)
class PairSet(PairPredicate):
    pairs: frozenset

    def __init__(self, pairs):
        object.__setattr__(self, "pairs", frozenset(pairs))

    def evaluate(self, window, I, J):
        pts = window.points
        return np.array([(pts[i], pts[j]) in self.pairs for i, j in zip(I.tolist(), J.tolist())], dtype=bool)


@dataclass(frozen=True, eq=False)
class GraphOf(PairPredicate):
    """Pairs (x, f(x)) for a map f from the space to itself."""

    f: "MapTable"

    def evaluate(self, window, I, J):
        target = self.f.image_ids(window)
        return target[I] == J


@dataclass(frozen=True)
class PairUnion(PairPredicate):
    parts: tuple

    def evaluate(self, window, I, J):
        out = np.zeros(len(I), dtype=bool)
        for p in self.parts:
            out |= p.evaluate(window, I, J)
        return out


@dataclass(frozen=True)
class PairIntersection(PairPredicate):
    parts: tuple

    def evaluate(self, window, I, J):
        out = np.ones(len(I), dtype=bool)
        for p in self.parts:
            out &= p.evaluate(window, I, J)
        return out


@dataclass(frozen=True)
class PairComplement(PairPredicate):
    inner: PairPredicate

    def evaluate(self, window, I, J):
        return ~self.inner.evaluate(window, I, J)


def square(U):
    return Square(U)


def cross(U, V):
    return Cross(U, V)


def complement_of_union_of_squares(family, target=None):
    return CoverDefect(All() if target is None else target, tuple(family))


# ---------------------------------------------------------------------------
# Location tests
# ---------------------------------------------------------------------------


class _Witnesses:
    """Keeps the lexicographically smallest id pairs seen so far."""

    def __init__(self):
        self.I = np.zeros(0, dtype=np.int64)
        self.J = np.zeros(0, dtype=np.int64)

    def add(self, I, J):
        if len(I) == 0:
            return
        I = np.concatenate([self.I, I])
        J = np.concatenate([self.J, J])
        order = np.lexsort((J, I))
        pairs = np.unique(np.stack([I[order], J[order]], axis=1), axis=0)[:MAX_WITNESSES]
        self.I, self.J = pairs[:, 0], pairs[:, 1]

    def __len__(self):
        return len(self.I)

    def as_points(self, window):
        pts = window.points
        return tuple((pts[i], pts[j]) for i, j in zip(self.I.tolist(), self.J.tolist()))


def _location_verdict(worst_by_scale, witnesses, window, R, details=None):
    W = window.W
    details = dict(details or {})
    details["bounds"] = {r: max(b, 0) for r, b in worst_by_scale.items()}
    if witnesses is not None and len(witnesses):
        return Verdict(Status.FAILS, R, W, witnesses.as_points(window), None, details)
    bound = max(max(worst_by_scale.values()), 0)
    if bound > W - R:
        # only reachable when R > W/4, which callers reject up front
        return Verdict(Status.INCONCLUSIVE, R, W, (), bound, details)
    return Verdict(Status.HOLDS, R, W, (), bound, details)


def coentourage_verdict(space, C, sched, W):
    """Is C a coentourage: does C meet each E_r only inside a bounded square?"""
    sched = ScaleSchedule(sched)
    _require_window(sched, W)
    win = space.window(W)
    rad = win.radius
    T = outer_shell_start(W)
    worst = {r: -1 for r in sched}
    per_scale = {r: _Witnesses() for r in sched}

    def consider(I, J, d):
        v = C.evaluate(win, I, J)
        if not v.any():
            return
        I, J, d = I[v], J[v], d[v]
        prad = np.maximum(rad[I], rad[J])
        for r in sched:
            sel = d <= r
            if sel.any():
                worst[r] = max(worst[r], int(prad[sel].max()))
                hit = sel & (prad > T)
                per_scale[r].add(I[hit], J[hit])

    diag = np.arange(len(win), dtype=np.int64)
    consider(diag, diag, np.zeros(len(win), dtype=np.int64))
    if sched.max > 0:
        for I, J in space.pair_chunks(win, sched.max):
            d = space.pair_distances(win, I, J)
            consider(I, J, d)
            consider(J, I, d)
    failing = next((per_scale[r] for r in sched if len(per_scale[r])), None)
    return _location_verdict(worst, failing, win, sched.max)


def _mask_verdict(space, mask_by_scale, W, R, threshold=None):
    win = space.window(W)
    rad = win.radius
    T = outer_shell_start(W) if threshold is None else threshold
    worst = {}
    failing = None
    for r, m in mask_by_scale.items():
        idx = np.flatnonzero(m)
        worst[r] = int(rad[idx].max()) if len(idx) else -1
        hit = idx[rad[idx] > T]
        if len(hit) and failing is None:
            failing = _Witnesses()
            failing.add(hit[:MAX_WITNESSES], hit[:MAX_WITNESSES])
    return _location_verdict(worst, failing, win, R)


def is_bounded_subset(space, U, W):
    """Does U stay inside a ball that does not reach the outer shell?"""
    win = space.window(W)
    return _mask_verdict(space, {0: U.mask(win)}, W, 0)


def divergence_set(target, family, r):
    """target ∩ E_r[target \\ U_1] ∩ ... ∩ E_r[target \\ U_n]."""
    parts = [target] + [Intersection((Thickened(target - U, r), target)) for U in family]
    return Intersection(tuple(parts))


def _divergence_masks(space, target, family, sched, win):
    """divergence_set restricted to window data, the same data form (a) sees."""
    t = target.mask(win)
    out = {}
    for r in sched:
        m = t.copy()
        for U in family:
            m &= space.dilate(win, t & ~U.mask(win), r)
        out[r] = m
    return out


def _divergence_verdict(space, target, family, sched, W, slack=False):
    win = space.window(W)
    masks = _divergence_masks(space, target, family, sched, win)
    if not slack:
        return _mask_verdict(space, masks, W, sched.max)
    verdicts = [_mask_verdict(space, {r: m}, W, sched.max, outer_shell_start(W) + r) for r, m in masks.items()]
    return combine(verdicts, R=sched.max, W=W)


def cover_verdict(space, target, family, sched, W):
    """Does ``family`` coarsely cover ``target``?

    Evaluates both the coentourage form (a) and the divergence form (b) on
    the same window data. A failure of (a) always forces a failure of (b).
    For two pieces a point of (b) at scale r certifies an (a) violation at
    scale 2r within distance r of it, so when (a) holds and (b) fails we
    re-run (a) at doubled scales and (b) with the shell pushed out by r. A
    disagreement that survives this raises DisagreeingCharacterizations.
    """
    sched = ScaleSchedule(sched)
    family = tuple(family)
    if not family:
        b = is_bounded_subset(space, target, W)
        if b.holds:
            return Verdict(Status.HOLDS, sched.max, W, (), b.bound, {"empty_family": True})
        raise EmptyFamilyOnUnbounded("an empty family only covers bounded targets")
    _require_window(sched, W)
    a = coentourage_verdict(space, CoverDefect(target, family), sched, W)
    b = _divergence_verdict(space, target, family, sched, W)
    details = {"coentourage": a.status.value, "divergence": b.status.value, "bounds": a.details.get("bounds")}
    if a.status is b.status:
        return Verdict(a.status, a.R, W, a.witness, a.bound, details)
    if a.fails:
        raise DisagreeingCharacterizations(f"coentourage form fails but divergence form holds at W={W}")
    doubled = [2 * r for r in sched if 0 < 2 * r <= W // 4]
    if doubled:
        a2 = coentourage_verdict(space, CoverDefect(target, family), doubled, W)
        if a2.fails:
            details["escalated_scales"] = tuple(doubled)
            return Verdict(Status.FAILS, a.R, W, a2.witness, None, details)
    b2 = _divergence_verdict(space, target, family, sched, W, slack=True)
    if b2.holds:
        details["divergence"] = "Holds (shell + r)"
        return Verdict(Status.HOLDS, a.R, W, (), a.bound, details)
    raise DisagreeingCharacterizations(f"divergence form fails but coentourage form holds at W={W}")


def shift_cover(r, family, Y):
    """(E_r[U_i])_i and E_r[Y]; E_0 is the identity."""
    if r <= 0:
        return list(family), Y
    return [Thickened(U, r) for U in family], Thickened(Y, r)


def is_refinement(space, fine, coarse, W):
    """Assignment j -> smallest i with fine_j ⊆ coarse_i on the window, or None."""
    win = space.window(W)
    cmasks = [U.mask(win) for U in coarse]
    out = []
    for V in fine:
        m = V.mask(win)
        hit = next((i for i, c in enumerate(cmasks) if not (m & ~c).any()), None)
        if hit is None:
            return None
        out.append(hit)
    return out


# ---------------------------------------------------------------------------
# Maps
# ---------------------------------------------------------------------------


class MapTable:
    """A map between spaces, tabulated on demand over domain windows.

    ``fn`` takes a list of domain points and returns the list of their
    images. ``domain_subspace`` restricts the domain to a subset carrying the
    metric of the ambient domain space (e.g. 2Z inside Z).
    """

    def __init__(self, domain, codomain, fn, domain_subspace=None, name="f"):
        self.domain = domain
        self.codomain = codomain
        self.fn = fn
        self.domain_subspace = domain_subspace
        self.name = name
        self._tables = {}

    def __repr__(self):
        return f"MapTable({self.name}: {self.domain.describe()} -> {self.codomain.describe()})"

    def domain_mask(self, window):
        if self.domain_subspace is None:
            return np.ones(len(window), dtype=bool)
        return self.domain_subspace.mask(window)

    def table(self, W):
        """Images of every point of the domain window W (None off the domain)."""
        tab = self._tables.get(W)
        if tab is None:
            win = self.domain.window(W)
            m = self.domain_mask(win)
            idx = np.flatnonzero(m)
            images = self.fn([win.points[i] for i in idx])
            tab = [None] * len(win)
            for i, y in zip(idx.tolist(), images):
                tab[i] = y
            self._tables[W] = tab
        return tab

    def __call__(self, x):
        return self.fn([x])[0]

    def image_ids(self, window):
        """Id of f(x) in the same window (-1 if outside); needs codomain == domain."""
        key = ("image_ids", id(self))
        out = window.cache.get(key)
        if out is None:
            tab = self.table(window.W)
            index = window.index
            out = np.array([-1 if y is None else index.get(y, -1) for y in tab], dtype=np.int64)
            window.cache[key] = out
        return out

    def materialize(self, W):
        win = self.domain.window(W)
        return {win.points[i]: y for i, y in enumerate(self.table(W)) if y is not None}


def _ids_of_domain(f, W):
    win = f.domain.window(W)
    return win, np.flatnonzero(f.domain_mask(win))


def _value_verdict(values, R, W, witness=(), details=None):
    """values: the tracked supremum on the three probe windows."""
    v_half, v_mid, v_full = values
    details = dict(details or {})
    details["probes"] = tuple(values)
    if v_mid == v_full:
        return Verdict(Status.HOLDS, R, W, (), v_full, details)
    if v_half < v_mid < v_full:
        return Verdict(Status.FAILS, R, W, tuple(witness), None, details)
    return Verdict(Status.INCONCLUSIVE, R, W, (), None, details)


def _probe_max(values, radius, W):
    """Max of ``values`` over points of radius <= W' for each probe W'."""
    out = []
    for Wp in probe_windows(W):
        sel = radius <= Wp
        out.append(int(values[sel].max()) if sel.any() else 0)
    return out


def _top_witnesses(values, radius, W, make):
    T = outer_shell_start(W)
    sel = np.flatnonzero(radius > T)
    if not len(sel):
        return ()
    best = sel[values[sel] == values[sel].max()][:MAX_WITNESSES]
    return tuple(make(i) for i in best.tolist())


def closeness_verdict(f, g, sched, W):
    """Is {(f(x), g(x))} an entourage?"""
    if f.domain is not g.domain or f.codomain is not g.codomain:
        raise DomainMismatch("closeness needs maps with the same domain and codomain")
    sched = ScaleSchedule(sched)
    win, idx = _ids_of_domain(f, W)
    tf, tg = f.table(W), g.table(W)
    fx = [tf[i] for i in idx]
    gx = [tg[i] for i in idx]
    if any(y is None for y in gx):
        raise DomainMismatch("closeness needs maps defined on the same domain")
    disp = f.codomain.distances(fx, gx) if len(idx) else np.zeros(0, dtype=np.int64)
    radius = win.radius[idx]
    values = _probe_max(disp, radius, W)
    witness = _top_witnesses(disp, radius, W, lambda k: (fx[k], gx[k]))
    return _value_verdict(values, sched.max, W, witness)


def _uniformity(f, r, W):
    """Probe maxima of d(f x, f y) over domain pairs with d(x, y) <= r."""
    win, idx = _ids_of_domain(f, W)
    m = f.domain_mask(win)
    tab = f.table(W)
    best = np.zeros(len(win), dtype=np.int64)
    if r > 0:
        for I, J in f.domain.pair_chunks(win, r):
            keep = m[I] & m[J]
            I, J = I[keep], J[keep]
            if not len(I):
                continue
            d = f.codomain.distances([tab[i] for i in I.tolist()], [tab[j] for j in J.tolist()])
            pr = np.where(win.radius[I] >= win.radius[J], I, J)
            np.maximum.at(best, pr, d)
    return best[idx], win.radius[idx], win, idx


def coarse_map_verdict(f, sched, W):
    """Coarsely uniform (stable s(r)) and coarsely proper (stable p(b))."""
    sched = ScaleSchedule(sched)
    parts = {}
    for r in sched:
        vals, radius, win, idx = _uniformity(f, r, W)
        wit = _top_witnesses(vals, radius, W, lambda k: (win.points[idx[k]], f.table(W)[idx[k]]))
        parts[f"uniform[{r}]"] = _value_verdict(_probe_max(vals, radius, W), r, W, wit)
    win, idx = _ids_of_domain(f, W)
    tab = f.table(W)
    img_norm = f.codomain.norms([tab[i] for i in idx]) if len(idx) else np.zeros(0, dtype=np.int64)
    radius = win.radius[idx]
    for b in sorted({0, *sched}):
        vals = np.where(img_norm <= b, radius, 0)
        wit = _top_witnesses(vals, radius, W, lambda k: (win.points[idx[k]], tab[idx[k]]))
        parts[f"proper[{b}]"] = _value_verdict(_probe_max(vals, radius, W), b, W, wit)
    details = {k: v.status.value for k, v in parts.items()}
    details["s"] = {r: parts[f"uniform[{r}]"].bound for r in sched}
    return combine(parts.values(), R=sched.max, W=W, details=details)


def _distance_to_set(space, window, ids, target_points):
    """Distance from each window point in ``ids`` to a finite point set."""
    if not len(target_points):
        return np.full(len(ids), np.iinfo(np.int64).max // 4, dtype=np.int64)
    if isinstance(space, GridSpace):
        from scipy.spatial import cKDTree

        tree = cKDTree(space.as_array(target_points))
        p = np.inf if space.metric == "linf" else 1
        d, _ = tree.query(window.array[ids], p=p)
        return np.rint(d).astype(np.int64)
    pts = [window.points[i] for i in ids]
    return np.array([min(space.distance(x, y) for y in target_points) for x in pts], dtype=np.int64)


def coarsely_surjective_verdict(f, sched, W):
    """Is every codomain point within a stable distance of the image?"""
    sched = ScaleSchedule(sched)
    # image points just outside the window still serve points near its rim
    Wd = min(W + W // 4, f.domain.max_window)
    _, idx = _ids_of_domain(f, Wd)
    tab = f.table(Wd)
    image = list(dict.fromkeys(tab[i] for i in idx))
    cwin = f.codomain.window(min(W, f.codomain.max_window))
    cids = np.arange(len(cwin))
    gap = _distance_to_set(f.codomain, cwin, cids, image)
    values = _probe_max(gap, cwin.radius, cwin.W)
    wit = _top_witnesses(gap, cwin.radius, cwin.W, lambda k: (cwin.points[k], cwin.points[k]))
    return _value_verdict(values, sched.max, cwin.W, wit)


def identity_map(space, domain_subspace=None):
    return MapTable(space, space, lambda xs: list(xs), domain_subspace, name="id")


def flasque_verdict(space, phi, sched, W, N):
    """(i) phi close to id, (ii) iterates leave bounded sets for good,
    (iii) the iterates are uniformly controlled at each scale."""
    sched = ScaleSchedule(sched)
    if N < 1:
        raise InvalidParameter("horizon N must be positive")
    win = space.window(W)
    pts = list(win.points)
    iterates = [pts]
    cur = pts
    for n in range(1, N + 1):
        cur = phi.fn(cur)
        norms = space.norms(cur)
        if len(norms) and int(norms.max()) > space.max_window:
            raise IterateEscapesWindow(f"iterate {n} leaves max_window {space.max_window}; reduce N or W")
        iterates.append(cur)
    norms = [space.norms(it) for it in iterates]

    v_i = closeness_verdict(phi, identity_map(space), sched, W)

    # (ii) for balls B_b, which n have phi^n(window) meeting B_b?
    sub = {}
    for b in sorted({0, N // 8, N // 4}):
        hits = [n for n in range(N + 1) if (norms[n] <= b).any()]
        if hits == list(range(len(hits))) and (not hits or hits[-1] < N // 2):
            sub[b] = Verdict(Status.HOLDS, b, W, (), len(hits))
        elif all(n in hits for n in range(N // 2, N + 1)):
            x = next(p for p, d in zip(iterates[N], norms[N]) if d <= b)
            sub[b] = Verdict(Status.FAILS, b, W, ((x, x),), None)
        else:
            sub[b] = Verdict(Status.INCONCLUSIVE, b, W, (), None)
    v_ii = combine(sub.values(), R=max(sub), W=W, details={"N_B": {b: v.bound for b, v in sub.items()}})

    # (iii) sup over n <= N of d(phi^n x, phi^n y) for d(x, y) <= r
    parts = []
    for r in sched:
        best = np.zeros(len(win), dtype=np.int64)
        if r > 0:
            for I, J in space.pair_chunks(win, r):
                pr = np.where(win.radius[I] >= win.radius[J], I, J)
                for it in iterates:
                    d = space.distances([it[i] for i in I.tolist()], [it[j] for j in J.tolist()])
                    np.maximum.at(best, pr, d)
        parts.append(_value_verdict(_probe_max(best, win.radius, W), r, W))
    v_iii = combine(parts, R=sched.max, W=W)

    details = {"i": v_i.status.value, "ii": v_ii.status.value, "iii": v_iii.status.value}
    out = combine([v_i, v_ii, v_iii], R=sched.max, W=W, details=details)
    return out
