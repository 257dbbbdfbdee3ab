"""Čech cohomology of coarse covers with constant coefficients.

Sections of the constant sheaf over a subspace U are A^{e(U)}, one copy of
the coefficient group per end, and restriction along V ⊆ U copies the value
of the end of U that contains each end of V. Cochains are alternating: one
basis element per strictly increasing index tuple and end of the
corresponding intersection.

All matrices are integer; cohomology with coefficients in A follows from the
integral cohomology by the universal coefficient formula
H^k(C ⊗ A) = H^k(C) ⊗ A ⊕ Tor(H^{k+1}(C), A).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .coarse_logic import ScaleSchedule, cover_verdict, is_refinement
from .ends import EndsParams, end_restriction, ends
from .errors import (
    CoverNotVerified,
    InfiniteEnds,
    InfiniteEndsInIntersection,
    InvalidParameter,
    NotARefinement,
)
from .snf import (
    AbelianGroupFG,
    IntegerMatrix,
    Z,
    elementary_divisors,
    rational_nullspace,
    rational_rank,
    rational_rank_of_columns,
)
from .subspaces import intersect_all

DEFAULT_SCALES = (1, 2)


def _params(params, W):
    if params is None:
        if W is None:
            raise InvalidParameter("give either ends params or a window radius")
        return EndsParams(W)
    return params


def _coeff(coeff):
    # accept "Z/2"-style strings as well as groups
    return AbelianGroupFG.parse(coeff) if isinstance(coeff, str) else coeff


def constant_sections(space, U, coeff=Z, params=None, W=None):
    """A^{e(U)}; the trivial group for bounded U."""
    rep = ends(space, U, _params(params, W))
    if not rep.finite:
        raise InfiniteEnds(f"sections over a set with {rep.count} ends are not finitely generated")
    return _coeff(coeff).power(rep.count)


@dataclass
class CechComplex:
    space: object
    target: object
    cover: tuple
    coeff: AbelianGroupFG
    params: EndsParams
    bases: list
    differentials: list
    pieces: dict = field(repr=False, default_factory=dict)

    @property
    def dims(self):
        return [len(b) for b in self.bases]

    @property
    def top_degree(self):
        return len(self.bases) - 1

    def check_d_squared(self):
        """D_{k+1} D_k == 0 for every k (exact integer products)."""
        for a, b in zip(self.differentials, self.differentials[1:]):
            if not (b @ a).is_zero():
                return False
        return True


def _piece(target, cover, tau):
    return intersect_all((target,) + tuple(cover[i] for i in tau))


def _verify(space, target, cover, params, sched):
    sched = ScaleSchedule(DEFAULT_SCALES if sched is None else sched)
    v = cover_verdict(space, target, cover, sched, params.W)
    if not v.holds:
        raise CoverNotVerified(f"cover verdict is {v.status.value} at R={v.R}, W={v.W}")
    return v


def cech_complex(space, target, cover, coeff=Z, params=None, W=None, sched=None, verify=True):
    params = _params(params, W)
    coeff = _coeff(coeff)
    cover = tuple(cover)
    if verify:
        _verify(space, target, cover, params, sched)
    pieces = {}
    bases = []
    for k in range(len(cover)):
        basis = []
        for tau in itertools.combinations(range(len(cover)), k + 1):
            # an intersection inside an endless one has no ends either
            if k and any(pieces[tau[:i] + tau[i + 1:]][1] == 0 for i in range(len(tau))):
                pieces[tau] = (None, 0)
                continue
            S = _piece(target, cover, tau)
            rep = ends(space, S, params)
            if not rep.finite:
                raise InfiniteEndsInIntersection(f"intersection {tau} has {rep.count} ends")
            pieces[tau] = (S, rep.count)
            basis += [(tau, e) for e in range(rep.count)]
        bases.append(basis)
    if not bases:
        bases = [[]]
    differentials = []
    for k in range(len(bases) - 1):
        differentials.append(_coboundary(space, params, pieces, bases[k], bases[k + 1]))
    cx = CechComplex(space, target, cover, coeff, params, bases, differentials, pieces)
    if not cx.check_d_squared():
        raise AssertionError("coboundary does not square to zero")
    return cx


def _coboundary(space, params, pieces, src, dst):
    col = {b: j for j, b in enumerate(src)}
    data = [[0] * len(src) for _ in dst]
    cache = {}
    for row, (tau, u) in enumerate(dst):
        for nu in range(len(tau)):
            sigma = tau[:nu] + tau[nu + 1:]
            key = (tau, sigma)
            if key not in cache:
                cache[key] = end_restriction(space, pieces[tau][0], pieces[sigma][0], params).assignment
            v = cache[key][u]
            data[row][col[(sigma, v)]] += -1 if nu % 2 else 1
    return IntegerMatrix(data, len(dst), len(src))


@dataclass(frozen=True)
class CohomologyResult:
    groups: tuple
    integral: tuple
    dims: tuple
    ranks: tuple
    coeff: AbelianGroupFG
    W: int

    def __getitem__(self, k):
        return self.groups[k] if 0 <= k < len(self.groups) else AbelianGroupFG()

    def integral_at(self, k):
        return self.integral[k] if 0 <= k < len(self.integral) else AbelianGroupFG()

    def euler_consistent(self):
        """sum (-1)^k dim C^k == sum (-1)^k betti_k (integral complex)."""
        lhs = sum((-1) ** k * d for k, d in enumerate(self.dims))
        rhs = sum((-1) ** k * g.rank for k, g in enumerate(self.integral))
        return lhs == rhs


def cohomology(cx):
    dims = cx.dims
    divisors = [elementary_divisors(D) for D in cx.differentials]
    ranks = [len(d) for d in divisors]
    integral = []
    for k, n in enumerate(dims):
        r_out = ranks[k] if k < len(ranks) else 0
        r_in = ranks[k - 1] if k >= 1 else 0
        torsion = tuple(d for d in divisors[k - 1] if d > 1) if k >= 1 else ()
        integral.append(AbelianGroupFG(n - r_out - r_in, torsion))
    groups = []
    for k, H in enumerate(integral):
        nxt = integral[k + 1] if k + 1 < len(integral) else AbelianGroupFG()
        groups.append(H.tensor(cx.coeff) + nxt.tor(cx.coeff))
    return CohomologyResult(tuple(groups), tuple(integral), tuple(dims), tuple(ranks), cx.coeff, cx.params.W)


def cover_cohomology(space, target, cover, coeff=Z, params=None, W=None, sched=None, verify=True):
    return cohomology(cech_complex(space, target, cover, coeff, params, W, sched, verify))


# ---------------------------------------------------------------------------
# Mayer-Vietoris
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MVNode:
    name: str
    dim: int
    rank_in: int
    kernel_out: int

    @property
    def exact(self):
        return self.rank_in == self.kernel_out


@dataclass(frozen=True)
class MVReport:
    nodes: tuple
    composite_zero: bool
    H_X: CohomologyResult

    @property
    def exact(self):
        return self.composite_zero and all(n.exact for n in self.nodes)


def _restriction_matrix(space, small, big, params, sign=1):
    """Matrix of A^{e(big)} -> A^{e(small)} (rows: ends of small)."""
    R = end_restriction(space, small, big, params)
    data = [[0] * R.codomain_count for _ in range(R.domain_count)]
    for u, v in enumerate(R.assignment):
        data[u][v] = sign
    return IntegerMatrix(data, R.domain_count, R.codomain_count)


def _block_diag_cols(left, right):
    """[left | right] with matching rows."""
    return left.hstack(right)


def mayer_vietoris_report(space, target, A, B, coeff=Z, params=None, W=None, sched=None, target_cover=None):
    """Rank bookkeeping for 0 -> H0(X) -> H0(A)+H0(B) -> H0(A∩B) -> H1(X) -> 0.

    H^k of a single set is A^{e} in degree 0 and zero above, so the long
    sequence collapses to these four terms followed by H^k(X) = 0 for k >= 2.
    H(X) is computed from ``target_cover`` when given (an independent cover),
    else from {A, B}.
    """
    params = _params(params, W)
    _verify(space, target, (A, B), params, sched)
    X = target
    A_ = intersect_all((X, A))
    B_ = intersect_all((X, B))
    AB = intersect_all((X, A, B))
    for S in (X, A_, B_, AB):
        if not ends(space, S, params).finite:
            raise InfiniteEnds("Mayer-Vietoris bookkeeping needs finite end counts")
    H_X = cover_cohomology(space, X, target_cover or (A, B), coeff, params, sched=sched)

    alpha = _restriction_matrix(space, A_, X, params).vstack(_restriction_matrix(space, B_, X, params))
    beta = _block_diag_cols(_restriction_matrix(space, AB, A_, params),
                            _restriction_matrix(space, AB, B_, params, sign=-1))
    composite_zero = (beta @ alpha).is_zero() if alpha.rows else True

    eX, eAB = alpha.cols, beta.rows
    mid = alpha.rows
    r_alpha = rational_rank(alpha)
    r_beta = rational_rank(beta)
    r_delta = eAB - r_beta
    h1 = H_X[1].rank
    nodes = [
        MVNode("H0(X)", eX, 0, eX - r_alpha),
        MVNode("H0(A)+H0(B)", mid, r_alpha, mid - r_beta),
        MVNode("H0(A∩B)", eAB, r_beta, eAB - r_delta),
        MVNode("H1(X)", h1, r_delta, h1),
    ]
    nodes += [MVNode(f"H{k}(X)", H_X[k].rank, 0, 0) for k in range(2, len(H_X.groups))]
    return MVReport(tuple(nodes), composite_zero, H_X)


# ---------------------------------------------------------------------------
# Refinements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RefinementComparison:
    assignment: tuple
    coarse: CohomologyResult
    fine: CohomologyResult
    induced_ranks: tuple
    chain_map_ok: bool

    @property
    def stabilized(self):
        top = max(len(self.coarse.integral), len(self.fine.integral))
        same = all(self.coarse.integral_at(k) == self.fine.integral_at(k) for k in range(top))
        iso = all(r == g.rank for r, g in zip(self.induced_ranks, self.coarse.integral))
        return same and iso and self.chain_map_ok


def _chain_map(space, params, coarse_cx, fine_cx, sigma, k):
    cb, fb = coarse_cx.bases[k], fine_cx.bases[k]
    col = {b: j for j, b in enumerate(cb)}
    data = [[0] * len(cb) for _ in fb]
    for row, (tau, u) in enumerate(fb):
        image = [sigma[j] for j in tau]
        if len(set(image)) < len(image):
            continue
        order = sorted(range(len(image)), key=lambda i: image[i])
        inversions = sum(1 for a in range(len(order)) for b in range(a + 1, len(order)) if order[a] > order[b])
        rho = tuple(sorted(image))
        if coarse_cx.pieces[rho][1] == 0:
            continue
        v = end_restriction(space, fine_cx.pieces[tau][0], coarse_cx.pieces[rho][0], params).assignment[u]
        data[row][col[(rho, v)]] = -1 if inversions % 2 else 1
    return IntegerMatrix(data, len(fb), len(cb))


def refinement_comparison(space, target, fine, coarse, coeff=Z, params=None, W=None, sched=None):
    params = _params(params, W)
    sigma = is_refinement(space, tuple(fine), tuple(coarse), params.W)
    if sigma is None:
        raise NotARefinement("some member of the fine cover lies in no member of the coarse cover")
    ccx = cech_complex(space, target, coarse, coeff, params, sched=sched)
    fcx = cech_complex(space, target, fine, coeff, params, sched=sched)
    degrees = min(len(ccx.bases), len(fcx.bases))
    maps = [_chain_map(space, params, ccx, fcx, sigma, k) for k in range(degrees)]
    ok = True
    for k in range(degrees - 1):
        if k < len(ccx.differentials) and k < len(fcx.differentials):
            if not (fcx.differentials[k] @ maps[k] == maps[k + 1] @ ccx.differentials[k]):
                ok = False
    induced = []
    for k in range(len(ccx.bases)):
        if k >= degrees:
            induced.append(0)
            continue
        cycles = rational_nullspace(ccx.differentials[k]) if k < len(ccx.differentials) else _unit_vectors(len(ccx.bases[k]))
        F = maps[k]
        images = [[sum(F.data[i][j] * z[j] for j in range(F.cols)) for i in range(F.rows)] for z in cycles]
        boundaries = []
        if k >= 1:
            D = fcx.differentials[k - 1]
            boundaries = [[D.data[i][j] for i in range(D.rows)] for j in range(D.cols)]
        n = F.rows
        induced.append(rational_rank_of_columns(images + boundaries, n) - rational_rank_of_columns(boundaries, n))
    return RefinementComparison(tuple(sigma), cohomology(ccx), cohomology(fcx), tuple(induced), ok)


def _unit_vectors(n):
    return [[int(i == j) for i in range(n)] for j in range(n)]
