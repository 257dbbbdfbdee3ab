"""Number of ends of a subspace, and how the ends of nested subspaces match up.

An end is counted as an r-connected component of ``U`` outside the open core
ball ``{x : d(x, base) < n}`` that reaches the outer quarter shell of the
window. The count is read off where it stops changing in both n and r.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousAssignment, InvalidParameter, NoPlateau, NotNested, WindowTooSmall
from .spaces import outer_shell_start

DEFAULT_CAP = 64
REPRESENTATIVES = 4


@dataclass(frozen=True)
class EndsParams:
    W: int
    r_range: tuple = (1, 2)
    n_range: tuple = ()
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if not self.n_range:
            defaults = (self.W // 8, (3 * self.W) // 16, self.W // 4)
            object.__setattr__(self, "n_range", tuple(sorted(set(defaults))))
        object.__setattr__(self, "r_range", tuple(int(r) for r in self.r_range))
        object.__setattr__(self, "n_range", tuple(int(n) for n in self.n_range))
        for name, vals in (("r_range", self.r_range), ("n_range", self.n_range)):
            if not vals or any(a >= b for a, b in zip(vals, vals[1:])):
                raise InvalidParameter(f"{name} must be nonempty and strictly increasing")
        if self.r_range[0] < 1:
            raise InvalidParameter("adjacency scales must be >= 1")
        if self.n_range[0] < 0:
            raise InvalidParameter("core radii must be nonnegative")
        if self.W < 4 * self.r_range[-1] or self.n_range[-1] > outer_shell_start(self.W):
            raise WindowTooSmall(
                f"window {self.W} too small for r_range {self.r_range} and n_range {self.n_range}"
            )

    @property
    def plateau(self):
        return self.r_range[-1], self.n_range[-1]


@dataclass(frozen=True)
class InfiniteAtCap:
    cap: int

    def __str__(self):
        return f"InfiniteAtCap({self.cap})"


@dataclass(frozen=True)
class EndComponent:
    component_id: int
    representatives: tuple
    size: int
    touches_outer_shell: bool = True


@dataclass(frozen=True)
class EndsReport:
    count: object
    components: tuple
    trace: dict
    params: EndsParams
    labels: np.ndarray = field(repr=False, compare=False, default=None)

    @property
    def finite(self):
        return isinstance(self.count, int)


def _shell_components(space, window, mask, r, n):
    core_free = mask & (window.radius >= n)
    labels = space.components(window, core_free, r)
    shell = window.shell & core_free
    ends = np.unique(labels[shell])
    remap = np.full(labels.max() + 2 if len(labels) else 1, -1, dtype=np.int64)
    remap[ends] = np.arange(len(ends))
    out = np.where(labels >= 0, remap[labels], -1)
    return out, len(ends)


def _half(values):
    return values[len(values) // 2:]


def ends(space, U, params=None, W=None):
    """Stabilized end count of U, with the per-(r, n) trace it was read from."""
    if params is None:
        params = EndsParams(W)
    elif W is not None and params.W != W:
        params = EndsParams(W, params.r_range, params.n_range, params.cap)
    win = space.window(params.W)
    key = ("ends", U, params)
    cached = win.cache.get(key)
    if cached is not None:
        return cached
    mask = U.mask(win)
    trace = {}
    plateau_labels = None
    if not (mask & win.shell).any():
        # nothing reaches the shell: bounded at this window
        trace = {(r, n): 0 for r in params.r_range for n in params.n_range}
        plateau_labels = np.full(len(win), -1, dtype=np.int64)
    else:
        for r in params.r_range:
            for n in params.n_range:
                labels, k = _shell_components(space, win, mask, r, n)
                trace[(r, n)] = k
                if (r, n) == params.plateau:
                    plateau_labels = labels
    top = {trace[(r, n)] for r in _half(params.r_range) for n in _half(params.n_range)}
    r_top = params.r_range[-1]
    growth = [trace[(r_top, n)] for n in _half(params.n_range)]
    growing = len(growth) > 1 and all(a < b for a, b in zip(growth, growth[1:]))
    if growing or (len(top) == 1 and next(iter(top)) > params.cap):
        count = InfiniteAtCap(params.cap)
    elif len(top) == 1:
        count = top.pop()
    else:
        raise NoPlateau(f"end counts did not stabilize: {trace}", trace)
    comps = []
    if isinstance(count, int):
        for e in range(count):
            ids = np.flatnonzero(plateau_labels == e)
            reps = tuple(win.points[i] for i in ids[:REPRESENTATIVES])
            comps.append(EndComponent(e, reps, int(len(ids))))
    report = EndsReport(count, tuple(comps), trace, params, plateau_labels)
    win.cache[key] = report
    return report


@dataclass(frozen=True)
class EndRestriction:
    """Which end of V contains each end of U (for U ⊆ V)."""

    domain_count: int
    codomain_count: int
    assignment: tuple

    def matrix(self):
        """0/1 matrix R with R[u, v] = 1 when end u of U lies in end v of V."""
        out = [[0] * self.codomain_count for _ in range(self.domain_count)]
        for u, v in enumerate(self.assignment):
            out[u][v] = 1
        return out


def end_restriction(space, U, V, params):
    win = space.window(params.W)
    mu, mv = U.mask(win), V.mask(win)
    if (mu & ~mv).any():
        bad = win.points[int(np.flatnonzero(mu & ~mv)[0])]
        raise NotNested(f"point {bad!r} lies in the smaller set but not the larger")
    eu = ends(space, U, params)
    ev = ends(space, V, params)
    if not (eu.finite and ev.finite):
        raise InvalidParameter("end restriction needs finite end counts")
    assignment = []
    for e in range(eu.count):
        targets = np.unique(ev.labels[eu.labels == e])
        if len(targets) != 1 or targets[0] < 0:
            raise AmbiguousAssignment(f"end {e} meets ends {targets.tolist()} of the larger set")
        assignment.append(int(targets[0]))
    return EndRestriction(eu.count, ev.count, tuple(assignment))
