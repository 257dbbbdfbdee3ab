"""Exact integer linear algebra: matrices, Smith normal form, f.g. abelian groups.

Everything runs on Python ints, so entries can grow without overflow.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction


class IntegerMatrix:
    """Dense rows x cols matrix of Python ints."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data, rows=None, cols=None):
        self.data = [[int(v) for v in row] for row in data]
        self.rows = len(self.data) if rows is None else rows
        if cols is None:
            cols = len(self.data[0]) if self.data else 0
        self.cols = cols
        if len(self.data) != self.rows or any(len(r) != self.cols for r in self.data):
            raise ValueError("ragged matrix data")

    @classmethod
    def zeros(cls, rows, cols):
        return cls([[0] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def identity(cls, n):
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n, n)

    @property
    def shape(self):
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other):
        return isinstance(other, IntegerMatrix) and self.shape == other.shape and self.data == other.data

    def __repr__(self):
        return f"IntegerMatrix({self.data!r}, {self.rows}, {self.cols})"

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = [[0] * other.cols for _ in range(self.rows)]
        for i, row in enumerate(self.data):
            acc = out[i]
            for k, a in enumerate(row):
                if a:
                    for j, b in enumerate(other.data[k]):
                        if b:
                            acc[j] += a * b
        return IntegerMatrix(out, self.rows, other.cols)

    def __neg__(self):
        return IntegerMatrix([[-v for v in row] for row in self.data], self.rows, self.cols)

    def transpose(self):
        return IntegerMatrix([[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)],
                             self.cols, self.rows)

    def is_zero(self):
        return not any(any(row) for row in self.data)

    def nonzeros(self):
        return sum(1 for row in self.data for v in row if v)

    def diagonal(self):
        return [self.data[i][i] for i in range(min(self.rows, self.cols))]

    def hstack(self, other):
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        return IntegerMatrix([a + b for a, b in zip(self.data, other.data)], self.rows, self.cols + other.cols)

    def vstack(self, other):
        if self.cols != other.cols:
            raise ValueError("column count mismatch")
        return IntegerMatrix(self.data + other.data, self.rows + other.rows, self.cols)


def determinant(M):
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = M.rows
    if n != M.cols:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    a = [row[:] for row in M.data]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def smith_normal_form(M):
    """Return (U, D, V) with U @ M @ V == D, D diagonal, d_i | d_{i+1}, d_i >= 0.

    U and V are products of elementary integer operations, hence unimodular.
    """
    m, n = M.rows, M.cols
    A = [row[:] for row in M.data]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        if q:
            A[dst] = [a + q * b for a, b in zip(A[dst], A[src])]
            U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        if q:
            for row in A:
                row[dst] += q * row[src]
            for row in V:
                row[dst] += q * row[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = A[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            # Euclid on column t: keep moving the smallest entry into the pivot
            while True:
                rows = [i for i in range(t + 1, m) if A[i][t]]
                if not rows:
                    break
                i = min(rows, key=lambda k: abs(A[k][t]))
                if abs(A[i][t]) < abs(A[t][t]):
                    swap_rows(t, i)
                    rows = [k for k in range(t + 1, m) if A[k][t]]
                for k in rows:
                    add_row(k, t, -(A[k][t] // A[t][t]))
            while True:
                cols = [j for j in range(t + 1, n) if A[t][j]]
                if not cols:
                    break
                j = min(cols, key=lambda k: abs(A[t][k]))
                if abs(A[t][j]) < abs(A[t][t]):
                    swap_cols(t, j)
                    cols = [k for k in range(t + 1, n) if A[t][k]]
                for k in cols:
                    add_col(k, t, -(A[t][k] // A[t][t]))
            if any(A[i][t] for i in range(t + 1, m)):
                continue
            p = A[t][t]
            bad = next((i for i in range(t + 1, m) if any(A[i][j] % p for j in range(t + 1, n))), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
    return IntegerMatrix(U, m, m), IntegerMatrix(A, m, n), IntegerMatrix(V, n, n)


def elementary_divisors(M):
    """Nonzero diagonal entries of the Smith form, in divisibility order."""
    _, D, _ = smith_normal_form(M)
    return [d for d in D.diagonal() if d]


def integer_rank(M):
    return len(elementary_divisors(M))


def rational_rank(M):
    """Rank over Q by Gaussian elimination on Fractions."""
    a = [[Fraction(v) for v in row] for row in M.data]
    rank = 0
    for c in range(M.cols):
        piv = next((i for i in range(rank, M.rows) if a[i][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for i in range(M.rows):
            if i != rank and a[i][c]:
                f = a[i][c] / a[rank][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# Finitely generated abelian groups
# ---------------------------------------------------------------------------


def _prime_powers(d):
    out = {}
    p = 2
    while p * p <= d:
        while d % p == 0:
            out[p] = out.get(p, 0) + 1
            d //= p
        p += 1
    if d > 1:
        out[d] = out.get(d, 0) + 1
    return out


def _invariant_factors(orders):
    """Combine cyclic orders (each >= 2) into the d_1 | d_2 | ... chain."""
    by_prime = {}
    for d in orders:
        for p, e in _prime_powers(d).items():
            by_prime.setdefault(p, []).append(e)
    length = max((len(v) for v in by_prime.values()), default=0)
    factors = [1] * length
    for p, exps in by_prime.items():
        exps = sorted(exps, reverse=True)
        for k, e in enumerate(exps):
            factors[length - 1 - k] *= p ** e
    return tuple(factors)


_TERM = re.compile(r"^(?:Z(?:\^(\d+))?|Z/(\d+)(?:\^(\d+))?)$")


@dataclass(frozen=True)
class AbelianGroupFG:
    """Z^rank ⊕ Z/d_1 ⊕ ... ⊕ Z/d_k with d_1 | d_2 | ... | d_k, d_1 >= 2."""

    rank: int = 0
    torsion: tuple = ()

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be nonnegative")
        t = tuple(int(d) for d in self.torsion)
        if any(d < 0 for d in t):
            raise ValueError("torsion orders must be positive")
        extra = sum(1 for d in t if d == 0)
        canon = _invariant_factors([d for d in t if d >= 2])
        object.__setattr__(self, "rank", self.rank + extra)
        object.__setattr__(self, "torsion", canon)

    @classmethod
    def free(cls, rank):
        return cls(rank, ())

    @classmethod
    def parse(cls, text):
        """Parse forms like ``0``, ``Z``, ``Z^2``, ``Z/2``, ``Z^2 + Z/3 + Z/3``."""
        text = text.replace(" ", "").replace("⊕", "+")
        if text in ("0", ""):
            return cls()
        rank, tors = 0, []
        for term in text.split("+"):
            m = _TERM.match(term)
            if not m:
                raise ValueError(f"cannot parse group term {term!r}")
            if m.group(2) is None:
                rank += int(m.group(1) or 1)
            else:
                tors += [int(m.group(2))] * int(m.group(3) or 1)
        return cls(rank, tuple(tors))

    def is_zero(self):
        return self.rank == 0 and not self.torsion

    def __str__(self):
        parts = []
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"

    def __add__(self, other):
        return AbelianGroupFG(self.rank + other.rank, self.torsion + other.torsion)

    def power(self, k):
        return AbelianGroupFG(self.rank * k, self.torsion * k)

    def tensor(self, other):
        tors = [d for d in other.torsion for _ in range(self.rank)]
        tors += [d for d in self.torsion for _ in range(other.rank)]
        tors += [math.gcd(a, b) for a in self.torsion for b in other.torsion]
        return AbelianGroupFG(self.rank * other.rank, tuple(d for d in tors if d >= 2))

    def tor(self, other):
        tors = [math.gcd(a, b) for a in self.torsion for b in other.torsion]
        return AbelianGroupFG(0, tuple(d for d in tors if d >= 2))


Z = AbelianGroupFG(1)


def rational_nullspace(M):
    """Basis (list of Fraction vectors) of {x : M x = 0} over Q."""
    a = [[Fraction(v) for v in row] for row in M.data]
    pivots = []
    r = 0
    for c in range(M.cols):
        piv = next((i for i in range(r, M.rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(M.rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(M.cols) if c not in set(pivots)]
    basis = []
    for fc in free:
        v = [Fraction(0)] * M.cols
        v[fc] = Fraction(1)
        for row, pc in enumerate(pivots):
            v[pc] = -a[row][fc]
        basis.append(v)
    return basis


def rational_rank_of_columns(columns, length):
    """Rank over Q of a list of column vectors of the given length."""
    if not columns:
        return 0
    rows = [[columns[j][i] for j in range(len(columns))] for i in range(length)]
    return _fraction_rank(rows, len(columns))


def _fraction_rank(rows, ncols):
    a = [[Fraction(v) for v in row] for row in rows]
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for i in range(rank + 1, len(a)):
            if a[i][c]:
                f = a[i][c] / a[rank][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank
