"""Ready-made coarse covers used by the examples and the regression suite."""

from __future__ import annotations

import itertools
from fractions import Fraction

from .subspaces import BlockUnion, Cone2, Ray, SignCone, Union


def z_halves():
    """{Z_-, Z_+} covering Z."""
    return [Ray("-"), Ray("+")]


def z2_cake(pieces=5, opening=90):
    """Planar cones of the given opening, rotated by 360/pieces degrees each.

    With five cones of 90 degrees neighbours overlap in 18 degree wedges and
    non-neighbours meet only near the origin.
    """
    step = 360 / pieces
    return [Cone2.from_angles(k * step, k * step + opening) for k in range(pieces)]


def z2_cake_halves(split=3):
    """Two unions of consecutive cake pieces: {S_0..S_(split-1)}, {the rest}."""
    cake = z2_cake()
    return Union(tuple(cake[:split])), Union(tuple(cake[split:]))


def zn_sign_cones(n=3, spread=3):
    """One widened orthant per sign pattern of Z^n (2^n pieces)."""
    return [SignCone(signs, spread) for signs in itertools.product("+-", repeat=n)]


def zplus_block_cover(q=2, pieces=2, lo=Fraction(3, 4), hi=Fraction(5, 4)):
    """Cover of Z_+ by ``pieces`` families of geometric blocks.

    Piece i is the union over k of [lo * q^(pieces k + i), hi * q^(pieces k + i + 1)],
    so consecutive pieces overlap on [lo q^j, hi q^j], a stretch whose length
    grows like q^j.
    """
    return [BlockUnion(q=q, period=pieces, phase=i, lo=Fraction(lo), hi=Fraction(hi)) for i in range(pieces)]


# the three nontrivial covers of Z_+ shipped for the acyclicity probe
ZPLUS_COVERS = {
    "halves-q2": dict(q=2, pieces=2, lo=Fraction(3, 4), hi=Fraction(5, 4)),
    "thirds-q4/3": dict(q=Fraction(4, 3), pieces=3, lo=Fraction(3, 4), hi=Fraction(5, 4)),
    "halves-q3": dict(q=3, pieces=2, lo=Fraction(2, 3), hi=Fraction(4, 3)),
}
