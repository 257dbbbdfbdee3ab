import itertools
from collections import deque

import pytest
from hypothesis import given, settings, strategies as st

from coarse.coarse_logic import MapTable, coarsely_surjective_verdict
from coarse.ends import EndsParams, InfiniteAtCap, end_restriction, ends
from coarse.errors import InvalidParameter, NotNested, WindowTooSmall
from coarse.spaces import GridSpace, build_space, outer_shell_start
from coarse.subspaces import All, Ball, BlockUnion, Ray, Residue

Z = build_space("zn(1)")


def oracle_count(space, member, W, r, n):
    """Breadth-first component count of {x in U : n <= |x| <= W} under d <= r,
    keeping only components that reach radius > 3W/4."""
    win = space.window(W)
    pts = [p for p in win.points if member(p) and space.norm(p) >= n]
    if isinstance(space, GridSpace):
        offs = [o for o in itertools.product(range(-r, r + 1), repeat=space.n) if any(o)]
        key = (lambda p: (p,)) if space.n == 1 else (lambda p: p)
        unkey = (lambda t: t[0]) if space.n == 1 else (lambda t: t)
        live = set(pts)

        def nbrs(p):
            for o in offs:
                q = unkey(tuple(a + b for a, b in zip(key(p), o)))
                if q in live and space.distance(p, q) <= r:
                    yield q
    else:
        def nbrs(p):
            return (q for q in pts if q != p and space.distance(p, q) <= r)

    seen, count = set(), 0
    T = outer_shell_start(W)
    for p in pts:
        if p in seen:
            continue
        seen.add(p)
        q, comp_max = deque([p]), 0
        while q:
            x = q.popleft()
            comp_max = max(comp_max, space.norm(x))
            for y in nbrs(x):
                if y not in seen:
                    seen.add(y)
                    q.append(y)
        count += comp_max > T
    return count


@pytest.mark.parametrize(
    "desc, W, expected",
    [("zplus", 256, 1), ("zn(1)", 256, 2), ("zn(2)", 64, 1), ("dihedral_infinity", 256, 2),
     ("disjoint_union(zn(1), zn(1))", 256, 4), ("zn(3)", 32, 1), ("explicit_path(20)", 64, 0)],
)
def test_end_counts(desc, W, expected):
    space = build_space(desc)
    rep = ends(space, All(), W=W)
    assert rep.count == expected
    assert len(rep.components) == expected
    assert all(c.touches_outer_shell for c in rep.components)


@pytest.mark.parametrize("desc, W", [("zplus", 128), ("zn(1)", 128), ("zn(2)", 32), ("dihedral_infinity", 64)])
def test_trace_matches_bfs_oracle(desc, W):
    space = build_space(desc)
    rep = ends(space, All(), W=W)
    for (r, n), c in rep.trace.items():
        assert c == oracle_count(space, lambda p: True, W, r, n)


def test_trace_is_monotone_in_r():
    rep = ends(Z, Residue(2, 0) | Ray("+"), W=256)
    for n in rep.params.n_range:
        counts = [rep.trace[(r, n)] for r in rep.params.r_range]
        assert counts == sorted(counts, reverse=True)


def test_free_group_grows_past_the_cap():
    F = build_space("free_group(2)")
    rep = ends(F, All(), EndsParams(8, (1, 2), (2, 3, 4, 5)))
    assert rep.count == InfiniteAtCap(64)
    assert not rep.finite
    counts = [rep.trace[(1, n)] for n in (2, 3, 4, 5)]
    assert counts == [4 * 3 ** (n - 1) for n in (2, 3, 4, 5)]


def test_cap_triggers_on_large_plateau():
    rep = ends(Z, Residue(4, 0), EndsParams(256, (1, 2), cap=1))
    # r = 2 cannot bridge gaps of 4: each point is its own component
    assert isinstance(rep.count, InfiniteAtCap)


def test_bounded_set_has_no_ends():
    rep = ends(Z, Ball(30), W=256)
    assert rep.count == 0 and rep.components == ()


def test_params_validation():
    with pytest.raises(WindowTooSmall):
        EndsParams(8, (1, 4))
    with pytest.raises(InvalidParameter):
        EndsParams(64, (2, 1))
    assert EndsParams(256).n_range == (32, 48, 64)


def test_coarse_equivalence_instances():
    assert ends(Z, Residue(2, 0), W=256).count == 2
    D = build_space("dihedral_infinity")
    axis = Ray("ab") | Ray("-ab")
    assert ends(D, axis, W=256).count == 2


def test_restriction_examples():
    p = EndsParams(256)
    R = end_restriction(Z, Ray("+"), All(), p)
    pos_end = ends(Z, All(), p).labels[Z.window(256).id_of(200)]
    assert R.assignment == (pos_end,)
    assert end_restriction(Z, All(), All(), p).assignment == (0, 1)
    far = All() - Ball(9)
    R = end_restriction(Z, far, All(), EndsParams(256, (1,), (32,)))
    assert sorted(R.assignment) == [0, 1]
    assert R.matrix() in ([[1, 0], [0, 1]], [[0, 1], [1, 0]])


def test_restriction_errors():
    p = EndsParams(256)
    with pytest.raises(NotNested):
        end_restriction(Z, All(), Ray("+"), p)
    # at r = 1 the evens split into 64 singleton components in the shell
    with pytest.raises(InvalidParameter):
        end_restriction(Z, Residue(2, 0), All(), EndsParams(256, (1,), (64,), cap=10))


@pytest.mark.parametrize("sub, expected", [(Residue(2, 0), True), (Residue(3, 1), True), (Ray("+"), False)])
def test_surjective_maps_do_not_increase_ends(sub, expected):
    inc = MapTable(Z, Z, lambda xs: list(xs), domain_subspace=sub)
    v = coarsely_surjective_verdict(inc, [1], 256)
    assert v.holds == expected
    e_dom = ends(Z, sub, EndsParams(256, (1, 2, 3, 4))).count
    if v.holds:
        assert e_dom >= ends(Z, All(), W=256).count


BUILTINS = ["zplus", "zn(1)", "dihedral_infinity", "explicit_path(20)", "zn(2)"]


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(BUILTINS), st.sampled_from(BUILTINS))
def test_additivity(a, b):
    W = 64
    union = build_space(f"disjoint_union({a}, {b})")
    expected = ends(build_space(a), All(), W=W).count + ends(build_space(b), All(), W=W).count
    assert ends(union, All(), W=W).count == expected


CHAINS = [
    (All() - Ball(12), All() - Ball(5), All()),
    (Ray("+") - Ball(3), Ray("+"), All()),
    ((Ray("-") - Ball(2)) & BlockUnion(((0, 10), (20, None))), Ray("-") - Ball(2), All() - Ball(2)),
    (Ray("+") | (Ray("-") - Ball(30)), Ray("+") | (Ray("-") - Ball(8)), All()),
]


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(CHAINS))
def test_restriction_is_functorial(chain):
    U, V, T = chain
    p = EndsParams(256)
    uv = end_restriction(Z, U, V, p).assignment
    vt = end_restriction(Z, V, T, p).assignment
    ut = end_restriction(Z, U, T, p).assignment
    assert tuple(vt[k] for k in uv) == ut


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 140), st.integers(0, 8)), max_size=5), st.booleans(), st.integers(150, 190))
def test_zplus_subsets_dichotomy(blocks, tail, start):
    ZP = build_space("zplus")
    ivs = tuple((a, a + w) for a, w in blocks) + (((start, None),) if tail else ())
    U = BlockUnion(ivs)
    inc = MapTable(ZP, ZP, lambda xs: list(xs), domain_subspace=U)
    surj = coarsely_surjective_verdict(inc, [1], 256).holds
    e = ends(ZP, U, W=256).count
    assert surj or e != 1
    assert e == (1 if tail else 0)
