import itertools
from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coarse.errors import InvalidParameter, UnknownKind, WindowTooLarge
from coarse.spaces import (
    DisjointUnion,
    ExplicitSpace,
    SpacePresentation,
    build_space,
    dihedral_infinity,
    free_group,
    in_entourage,
    probe_windows,
    window_points,
)

SPACES = [
    "zplus",
    "zn(1)",
    "zn(2, linf)",
    "zn(2, l1)",
    "zn(3)",
    "free_group(2)",
    "dihedral_infinity",
    "disjoint_union(zplus, zn(1))",
    "product(zplus, zn(1))",
    "explicit_path(20)",
]

WINDOWS = {"free_group(2)": 4, "zn(3)": 4}


def _win(desc):
    space = build_space(desc)
    return space, space.window(WINDOWS.get(desc, 6))


def _bfs_ball(gens, inverse, W):
    """Reduced words up to length W, found by breadth-first search on the Cayley graph."""
    dist = {"": 0}
    q = deque([""])
    while q:
        w = q.popleft()
        if dist[w] == W:
            continue
        for g in gens:
            v = w[:-1] if w and inverse[w[-1]] == g else w + g
            if v not in dist:
                dist[v] = dist[w] + 1
                q.append(v)
    return dist


@pytest.mark.parametrize("desc", SPACES)
def test_window_is_ball_sorted_by_radius(desc):
    space, win = _win(desc)
    assert win.points[0] == space.basepoint
    norms = space.norms(win.points)
    assert (norms == win.radius).all()
    assert (np.diff(win.radius) >= 0).all()
    assert len(set(win.points)) == len(win)


@pytest.mark.parametrize("desc", SPACES)
def test_smaller_window_is_prefix(desc):
    space, win = _win(desc)
    small = space.window(win.W - 2)
    assert list(win.points[: len(small)]) == list(small.points)
    assert win.prefix(win.W - 2) == len(small)


@pytest.mark.parametrize("desc", SPACES)
def test_pair_chunks_match_brute_force(desc):
    space, win = _win(desc)
    for r in (1, 2, 3):
        seen = []
        for I, J in space.pair_chunks(win, r):
            seen += [tuple(sorted(p)) for p in zip(I.tolist(), J.tolist())]
        assert len(seen) == len(set(seen)), "each pair once"
        expected = {
            (i, j) for i, j in itertools.combinations(range(len(win)), 2)
            if 0 < space.distance(win.points[i], win.points[j]) <= r
        }
        assert set(seen) == expected


@pytest.mark.parametrize("desc", SPACES)
def test_components_and_dilate_match_generic(desc):
    space, win = _win(desc)
    rng = np.random.default_rng(7)
    mask = rng.random(len(win)) < 0.5
    for r in (1, 2):
        fast = space.components(win, mask, r)
        slow = SpacePresentation.components(space, win, mask, r)
        assert (fast == slow).all()
        assert (space.dilate(win, mask, r) == SpacePresentation.dilate(space, win, mask, r)).all()


def test_free_group_ball_matches_bfs_oracle():
    F = free_group(2)
    oracle = _bfs_ball("aAbB", {"a": "A", "A": "a", "b": "B", "B": "b"}, 6)
    win = F.window(6)
    assert set(win.points) == set(oracle)
    assert all(win.radius[win.id_of(w)] == d for w, d in oracle.items())
    # sphere sizes 4 * 3^(k-1)
    counts = np.bincount(win.radius)
    assert counts.tolist() == [1] + [4 * 3 ** (k - 1) for k in range(1, 7)]


def test_free_group_distance_and_group_ops():
    F = free_group(2)
    assert F.reduce("aAbBa") == "a"
    assert F.multiply("ab", "Ba") == "aa"
    assert F.invert("abA") == "aBA"
    assert F.distance("ab", "aB") == 2
    assert F.distance("ab", "ab") == 0
    assert F.power("ab", 3) == "ababab"


def test_dihedral_words_alternate():
    D = dihedral_infinity()
    win = D.window(5)
    assert len(win) == 1 + 2 * 5
    assert all("aa" not in w and "bb" not in w for w in win.points)
    assert D.distance("ab", "aba") == 1


def test_disjoint_union_entourage_oracle():
    # Z_+ and Z glued by a unit bridge between basepoints: shortest paths in that graph
    space = DisjointUnion(build_space("zplus"), build_space("zn(1)"))
    win = space.window(16)
    pts = list(win.points)[:50]
    n = len(pts)
    inf = 10 ** 9
    d = [[0 if i == j else inf for j in range(n)] for i in range(n)]
    pos = {p: i for i, p in enumerate(pts)}
    for p in pts:
        side, a = p
        for q in ((side, a + 1), (1 - side, 0) if a == 0 else None):
            if q is not None and q in pos:
                d[pos[p]][pos[q]] = d[pos[q]][pos[p]] = 1
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    for i, j in itertools.combinations(range(n), 2):
        if d[i][j] < inf:
            assert space.distance(pts[i], pts[j]) == d[i][j]
        for r in (0, 1, 3):
            assert in_entourage(space, r, pts[i], pts[j]) == (d[i][j] <= r)


def test_product_uses_max_metric():
    P = build_space("product(zplus, zn(1))")
    assert P.distance((2, -1), (5, 3)) == 4
    win = P.window(3)
    assert len(win) == 4 * 7


def test_explicit_space_validation():
    with pytest.raises(InvalidParameter):
        ExplicitSpace([[0, 1], [2, 0]])
    with pytest.raises(InvalidParameter):
        ExplicitSpace([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    with pytest.raises(InvalidParameter):
        ExplicitSpace([[0, 0], [0, 0]])
    E = ExplicitSpace([[0, 2], [2, 0]])
    assert window_points(E, 1) == [0]
    assert window_points(E, 2) == [0, 1]


def test_window_limits_and_unknown_kind():
    Z = build_space("zplus")
    with pytest.raises(WindowTooLarge):
        Z.window(Z.max_window + 1)
    with pytest.raises(UnknownKind):
        build_space("torus")
    assert probe_windows(256) == (128, 192, 256)


def test_build_space_accepts_dict():
    S = build_space({"kind": "zn", "n": 2, "metric": "l1"})
    assert S.distance((0, 0), (2, -3)) == 5
    assert build_space("zn(2, linf)").distance((0, 0), (2, -3)) == 3


def _points(desc, W, draw):
    space = build_space(desc)
    pts = space.window(W).points
    idx = st.integers(0, len(pts) - 1)
    return space, [pts[draw(idx)] for _ in range(3)]


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(SPACES), st.data())
def test_metric_axioms(desc, data):
    space, (x, y, z) = _points(desc, WINDOWS.get(desc, 6), data.draw)
    dxy = space.distance(x, y)
    assert dxy == space.distance(y, x)
    assert (dxy == 0) == (x == y)
    assert space.distance(x, z) <= dxy + space.distance(y, z)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(SPACES), st.data(), st.integers(0, 3), st.integers(0, 3))
def test_entourage_composition(desc, data, r, s):
    # E_r o E_s is contained in E_(r+s)
    space, (x, y, z) = _points(desc, WINDOWS.get(desc, 6), data.draw)
    if in_entourage(space, r, x, y) and in_entourage(space, s, y, z):
        assert in_entourage(space, r + s, x, z)


def test_reference_values():
    assert build_space("zn(1)").distance(3, 7) == 4
    assert build_space("free_group(2)").distance("", "abA") == 3
    assert build_space("disjoint_union(zplus, zplus)").distance((0, 0), (1, 0)) == 1
    assert len(window_points(build_space("zplus"), 5)) == 6
    assert len(window_points(build_space("zn(2, linf)"), 2)) == 25
    assert len(window_points(build_space("free_group(2)"), 3)) == 53
    ZP = build_space("zplus")
    assert in_entourage(ZP, 3, 2, 5)
    assert not in_entourage(ZP, 2, 0, 5)
    assert in_entourage(build_space("zn(2, linf)"), 1, (0, 0), (1, 1))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 4), st.tuples(st.integers(0, 6), st.integers(-6, 6)), st.tuples(st.integers(0, 6), st.integers(-6, 6)))
def test_product_entourage_is_both_projections(r, p, q):
    P = build_space("product(zplus, zn(1))")
    expected = in_entourage(P.left, r, p[0], q[0]) and in_entourage(P.right, r, p[1], q[1])
    assert in_entourage(P, r, p, q) == expected
