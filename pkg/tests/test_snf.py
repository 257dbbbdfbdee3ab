import random

import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix, QQ, ZZ
from sympy.matrices.normalforms import invariant_factors
from sympy.polys.matrices import DomainMatrix

from coarse.snf import (
    AbelianGroupFG,
    IntegerMatrix,
    determinant,
    elementary_divisors,
    integer_rank,
    rational_nullspace,
    rational_rank,
    smith_normal_form,
)


def sympy_rank(rows, shape):
    if 0 in shape:
        return 0
    return DomainMatrix([[ZZ(v) for v in r] for r in rows], shape, ZZ).convert_to(QQ).rank()


def check_snf(M):
    U, D, V = smith_normal_form(M)
    assert U @ M @ V == D
    d = D.diagonal()
    for i in range(D.rows):
        for j in range(D.cols):
            if i != j:
                assert D[i, j] == 0
    nz = [x for x in d if x]
    assert all(x > 0 for x in nz)
    assert d[: len(nz)] == nz, "nonzero divisors come first"
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    return U, D, V, nz


def test_identity_and_zero():
    U, D, V, nz = check_snf(IntegerMatrix.identity(3))
    assert D == IntegerMatrix.identity(3)
    U, D, V, nz = check_snf(IntegerMatrix.zeros(3, 4))
    assert D.is_zero() and nz == []


def test_two_by_two_example():
    _, D, _, _ = check_snf(IntegerMatrix([[2, 4], [6, 8]]))
    assert D.diagonal() == [2, 4]


def test_empty_shapes():
    for shape in ((0, 3), (3, 0), (0, 0)):
        M = IntegerMatrix.zeros(*shape)
        U, D, V = smith_normal_form(M)
        assert D.shape == shape
        assert elementary_divisors(M) == []


def test_determinant_matches_sympy():
    rng = random.Random(3)
    for _ in range(50):
        n = rng.randint(1, 8)
        rows = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
        assert determinant(IntegerMatrix(rows)) == Matrix(rows).det()


def test_large_entries_do_not_overflow():
    M = IntegerMatrix([[10 ** 30, 3], [7, 10 ** 25 + 1]])
    _, D, _, nz = check_snf(M)
    assert nz[0] * nz[1] == abs(determinant(M))


def test_random_matrices_against_oracles():
    """500 random matrices up to 40 x 40 with entries in [-9, 9]."""
    rng = random.Random(20240601)
    for trial in range(500):
        m, n = rng.randint(1, 40), rng.randint(1, 40)
        if trial % 3 == 0:
            # low-rank products exercise torsion and kernels
            k = rng.randint(1, 4)
            A = [[rng.randint(-3, 3) for _ in range(k)] for _ in range(m)]
            B = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(k)]
            rows = [[sum(A[i][t] * B[t][j] for t in range(k)) for j in range(n)] for i in range(m)]
        else:
            rows = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)]
        M = IntegerMatrix(rows)
        U, D, V, nz = check_snf(M)
        r = sympy_rank(rows, (m, n))
        assert len(nz) == r == integer_rank(M) == rational_rank(M)
        if max(m, n) <= 8:
            assert abs(determinant(U)) == 1
            assert abs(determinant(V)) == 1
            assert tuple(x for x in nz if x > 1) == tuple(
                int(x) for x in invariant_factors(Matrix(rows), domain=ZZ) if abs(int(x)) > 1
            )


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.data())
def test_unimodular_and_divisible(m, n, data):
    rows = [[data.draw(st.integers(-20, 20)) for _ in range(n)] for _ in range(m)]
    M = IntegerMatrix(rows)
    U, D, V, nz = check_snf(M)
    assert abs(determinant(U)) == 1 and abs(determinant(V)) == 1
    assert integer_rank(M) == Matrix(rows).rank()


def test_nullspace():
    M = IntegerMatrix([[1, 2, 3], [2, 4, 6]])
    basis = rational_nullspace(M)
    assert len(basis) == 2
    for z in basis:
        assert all(sum(a * b for a, b in zip(row, z)) == 0 for row in M.data)


def test_matrix_helpers():
    A = IntegerMatrix([[1, 2], [3, 4]])
    assert A.transpose() == IntegerMatrix([[1, 3], [2, 4]])
    assert (A @ IntegerMatrix.identity(2)) == A
    assert A.hstack(A).shape == (2, 4)
    assert A.vstack(A).shape == (4, 2)
    assert (-A)[0, 1] == -2


# -- finitely generated abelian groups --------------------------------------


def test_group_parse_and_print():
    G = AbelianGroupFG.parse("Z^2 + Z/3 + Z/3")
    assert (G.rank, G.torsion) == (2, (3, 3))
    assert str(G) == "Z^2 + Z/3 + Z/3"
    assert str(AbelianGroupFG.parse("0")) == "0"
    assert AbelianGroupFG(0, (2, 3)).torsion == (6,)
    assert AbelianGroupFG(1, (0,)).rank == 2
    with pytest.raises(ValueError):
        AbelianGroupFG.parse("Q")


def test_group_algebra():
    Z = AbelianGroupFG(1)
    Z2 = AbelianGroupFG(0, (2,))
    assert Z.power(3) == AbelianGroupFG(3)
    assert Z2.power(2).torsion == (2, 2)
    assert Z.tensor(Z2) == Z2
    assert Z2.tensor(AbelianGroupFG(0, (3,))).is_zero()
    assert Z2.tor(AbelianGroupFG(0, (4,))) == Z2
    assert Z.tor(Z2).is_zero()
    assert (Z + Z2) == AbelianGroupFG(1, (2,))
