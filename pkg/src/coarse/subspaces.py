"""Subspaces as membership predicates, evaluated as boolean masks on windows.

Every subspace is a frozen, hashable value. ``mask(window)`` returns one
boolean per window point and is cached on the window, so repeated queries in
the verdict and cohomology code are free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidParameter
from .spaces import CayleySpace, DisjointUnion, GridSpace


class Subspace:
    def mask(self, window):
        key = ("mask", self)
        m = window.cache.get(key)
        if m is None:
            m = np.asarray(self._mask(window), dtype=bool)
            m.setflags(write=False)
            window.cache[key] = m
        return m

    def _mask(self, window):
        space = window.space
        return np.fromiter((self.contains(space, p) for p in window.points), bool, len(window))

    def contains(self, space, point):
        win = space.window(space.norm(point))
        return bool(self.mask(win)[win.id_of(point)])

    def points(self, window):
        m = self.mask(window)
        return [window.points[i] for i in np.flatnonzero(m)]

    def __or__(self, other):
        return Union((self, other))

    def __and__(self, other):
        return Intersection((self, other))

    def __invert__(self):
        return Complement(self)

    def __sub__(self, other):
        return Intersection((self, Complement(other)))


def _grid(window):
    if not isinstance(window.space, GridSpace):
        raise InvalidParameter(f"this subspace needs a grid space, not {window.space.describe()}")
    return window.array


@dataclass(frozen=True)
class All(Subspace):
    def _mask(self, window):
        return np.ones(len(window), dtype=bool)

    def contains(self, space, point):
        return True


@dataclass(frozen=True)
class Ray(Subspace):
    """``+``/``-`` half-lines of Z, a vector ray {k v : k >= 0} in Z^n, or
    the powers {w^k : k >= 0} of a group word (``-`` prefix for k <= 0)."""

    direction: object = "+"

    def _mask(self, window):
        space = window.space
        if isinstance(space, CayleySpace):
            word = str(self.direction)
            if word.startswith("-"):
                word = space.invert(word[1:])
            if space.reduce(word) == "":
                return np.array([p == "" for p in window.points])
            out = np.zeros(len(window), dtype=bool)
            k = 0
            while True:
                w = space.power(word, k)
                if len(w) > window.W:
                    break
                i = window.index.get(w)
                if i is not None:
                    out[i] = True
                k += 1
            return out
        a = _grid(window)
        d = self.direction
        if d in ("+", "-"):
            if a.shape[1] != 1:
                raise InvalidParameter("'+'/'-' rays need a one-dimensional space")
            d = (1,) if d == "+" else (-1,)
        v = np.asarray(d, dtype=np.int64).reshape(-1)
        if len(v) != a.shape[1] or not v.any():
            raise InvalidParameter(f"bad ray direction {self.direction!r}")
        j = int(np.flatnonzero(v)[0])
        k = a[:, j] // v[j]
        return (k >= 0) & (a == k[:, None] * v[None, :]).all(axis=1)


@dataclass(frozen=True)
class HalfSpace(Subspace):
    """{x : a . x >= c} in Z^n."""

    a: tuple
    c: int = 0

    def _mask(self, window):
        arr = _grid(window)
        a = np.asarray(self.a, dtype=np.int64)
        if len(a) != arr.shape[1]:
            raise InvalidParameter("halfspace normal has the wrong dimension")
        return arr @ a >= self.c


@dataclass(frozen=True)
class Sector(Subspace):
    """Closed orthant given by a sign per coordinate: '+', '-' or '*' (free)."""

    signs: tuple

    def _mask(self, window):
        arr = _grid(window)
        if len(self.signs) != arr.shape[1]:
            raise InvalidParameter("sector sign pattern has the wrong dimension")
        out = np.ones(len(window), dtype=bool)
        for k, s in enumerate(self.signs):
            if s == "+":
                out &= arr[:, k] >= 0
            elif s == "-":
                out &= arr[:, k] <= 0
            elif s != "*":
                raise InvalidParameter(f"bad sign {s!r}")
        return out


def _cross(u, x):
    return u[0] * x[:, 1] - u[1] * x[:, 0]


@dataclass(frozen=True)
class Cone2(Subspace):
    """Planar cone swept counterclockwise from direction u to direction v."""

    u: tuple
    v: tuple

    @classmethod
    def from_angles(cls, lo_deg, hi_deg, scale=1000):
        def direction(deg):
            t = math.radians(deg)
            return (round(scale * math.cos(t)), round(scale * math.sin(t)))

        if not 0 < hi_deg - lo_deg < 360:
            raise InvalidParameter("sector opening must lie strictly between 0 and 360 degrees")
        return cls(direction(lo_deg), direction(hi_deg))

    def _mask(self, window):
        arr = _grid(window)
        if arr.shape[1] != 2:
            raise InvalidParameter("angular sectors need Z^2")
        after_u = _cross(self.u, arr) >= 0
        before_v = -_cross(self.v, arr) >= 0
        convex = self.u[0] * self.v[1] - self.u[1] * self.v[0] > 0
        return (after_u & before_v) if convex else (after_u | before_v)


@dataclass(frozen=True)
class SignCone(Subspace):
    """Widened orthant {x : spread * s_i x_i + sum_j s_j x_j >= 0 for all i}.

    The plain orthant has spread = infinity; a finite spread lets cones with
    adjacent sign patterns overlap in sets that grow linearly with the radius.
    """

    signs: tuple
    spread: int = 3

    def _mask(self, window):
        arr = _grid(window)
        s = np.array([1 if c == "+" else -1 for c in self.signs], dtype=np.int64)
        if len(s) != arr.shape[1]:
            raise InvalidParameter("sign cone pattern has the wrong dimension")
        y = arr * s[None, :]
        total = y.sum(axis=1)
        return (self.spread * y + total[:, None] >= 0).all(axis=1)


def _norm_array(window):
    return window.radius


@dataclass(frozen=True)
class BlockUnion(Subspace):
    """Points whose distance to the basepoint lies in a union of blocks.

    Either an explicit tuple of closed intervals (``None`` as the right end
    means unbounded), or the geometric rule: blocks
    ``[lo * q^(period k + phase), hi * q^(period k + phase + 1)]`` for k >= 0.
    The default rule with q = 2 gives the blocks [4^k, 2 * 4^k].
    """

    intervals: tuple = ()
    q: Fraction = 0
    period: int = 2
    phase: int = 0
    lo: Fraction = Fraction(1)
    hi: Fraction = Fraction(1)

    def blocks_up_to(self, W):
        if not self.q:
            return [(a, W if b is None else min(b, W)) for a, b in self.intervals if a <= W]
        q = Fraction(self.q)
        if q <= 1:
            raise InvalidParameter("geometric blocks need ratio q > 1")
        out = []
        k = 0
        while True:
            e = self.period * k + self.phase
            a = math.ceil(Fraction(self.lo) * q ** e)
            if a > W:
                break
            b = math.floor(Fraction(self.hi) * q ** (e + 1))
            if a <= b:
                out.append((a, min(b, W)))
            k += 1
        return out

    def _mask(self, window):
        r = _norm_array(window)
        out = np.zeros(len(window), dtype=bool)
        for a, b in self.blocks_up_to(window.W):
            out |= (r >= a) & (r <= b)
        return out

    def contains(self, space, point):
        r = space.norm(point)
        return any(a <= r <= b for a, b in self.blocks_up_to(r))


@dataclass(frozen=True)
class Points(Subspace):
    members: frozenset

    def __init__(self, members):
        object.__setattr__(self, "members", frozenset(members))

    def _mask(self, window):
        return np.array([p in self.members for p in window.points], dtype=bool)

    def contains(self, space, point):
        return point in self.members


@dataclass(frozen=True)
class Ball(Subspace):
    """Closed ball of the given radius around the basepoint."""

    radius: int

    def _mask(self, window):
        return window.radius <= self.radius

    def contains(self, space, point):
        return space.norm(point) <= self.radius


@dataclass(frozen=True)
class Residue(Subspace):
    """Grid points with x_k = value (mod modulus); evens are Residue(2, 0)."""

    modulus: int
    value: int = 0
    axis: int = 0

    def _mask(self, window):
        return _grid(window)[:, self.axis] % self.modulus == self.value % self.modulus


@dataclass(frozen=True)
class Part(Subspace):
    """One summand of a disjoint union, optionally restricted to a subspace of it."""

    side: int
    inner: Subspace = None

    def _mask(self, window):
        if not isinstance(window.space, DisjointUnion):
            raise InvalidParameter("part(...) needs a disjoint union space")
        out = np.zeros(len(window), dtype=bool)
        part_win = window.part_windows[self.side]
        if part_win is None:
            return out
        ids = window.part_maps[self.side]
        sub = np.ones(len(part_win), dtype=bool) if self.inner is None else self.inner.mask(part_win)
        out[ids[sub]] = True
        return out


@dataclass(frozen=True)
class Factor(Subspace):
    """Product points whose chosen coordinate lies in a subspace of that factor."""

    side: int
    inner: Subspace

    def _mask(self, window):
        lw, rw = window.part_windows
        pid = window.pid
        sub = self.inner.mask(lw if self.side == 0 else rw)
        out = np.zeros(len(window), dtype=bool)
        sel = pid[sub, :] if self.side == 0 else pid[:, sub]
        out[sel.reshape(-1)] = True
        return out


@dataclass(frozen=True)
class Complement(Subspace):
    inner: Subspace

    def _mask(self, window):
        return ~self.inner.mask(window)

    def contains(self, space, point):
        return not self.inner.contains(space, point)


@dataclass(frozen=True)
class Union(Subspace):
    parts: tuple

    def _mask(self, window):
        out = np.zeros(len(window), dtype=bool)
        for p in self.parts:
            out |= p.mask(window)
        return out


@dataclass(frozen=True)
class Intersection(Subspace):
    parts: tuple

    def _mask(self, window):
        out = np.ones(len(window), dtype=bool)
        for p in self.parts:
            out &= p.mask(window)
        return out


def intersect_all(parts):
    parts = tuple(parts)
    if len(parts) == 1:
        return parts[0]
    return Intersection(parts)


@dataclass(frozen=True)
class Thickened(Subspace):
    """E_r[U] = {x : d(x, U) <= r}.

    Points of U just outside the window still thicken into it, so the mask is
    computed on the window of radius W + r (capped at max_window) and then
    restricted; ids are prefixes, so the restriction is a slice.
    """

    inner: Subspace
    r: int

    def _mask(self, window):
        if self.r <= 0:
            return self.inner.mask(window)
        space = window.space
        big = space.window(min(window.W + self.r, space.max_window))
        grown = space.dilate(big, self.inner.mask(big), self.r)
        return grown[: len(window)]


@dataclass(frozen=True)
class Explicit(Subspace):
    """A subspace frozen to a concrete mask over one window radius.

    Used to hand materialized sets back to callers; evaluating it on a larger
    window treats points beyond the frozen radius as absent.
    """

    W: int
    ids: tuple

    def _mask(self, window):
        out = np.zeros(len(window), dtype=bool)
        ids = np.asarray(self.ids, dtype=np.int64)
        out[ids[ids < len(window)]] = True
        return out


def subspace_eval(s, x, space):
    """Membership of point x in subspace s of the given space."""
    return bool(s.contains(space, x))
