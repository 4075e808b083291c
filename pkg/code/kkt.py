import logging
from dataclasses import dataclass

import numpy as np

from states import *

logger = logging.getLogger(__name__)

NORMALIZATION_TOL = 1e-9
DEGENERACY_TOL = 1e-14

FEASIBLE = "feasible"
INFEASIBLE_SIGN = "infeasible-sign"
RANK_DEFICIENT = "rank-deficient"


@dataclass(frozen=True)
class SupportSystem:
    support: tuple
    A: np.ndarray
    B: np.ndarray
    rank: int
    gram: np.ndarray

    @property
    def K( self ):
        return len(self.support)


@dataclass(frozen=True)
class PseudoProbability:
    values: np.ndarray | None
    feasible: bool
    distance: float | None = None
    weights: np.ndarray | None = None # clamped and renormalized, only when feasible
    rank_deficient: bool = False

    @property
    def outcome( self ):
        if self.rank_deficient:
            return RANK_DEFICIENT
        return FEASIBLE if self.feasible else INFEASIBLE_SIGN


@dataclass(frozen=True)
class LevelResult:
    supports: np.ndarray # (C, K)
    values: np.ndarray # pseudo-probabilities, nan where rank deficient
    rank: np.ndarray
    feasible: np.ndarray
    weights: np.ndarray # clamped weights, nan where infeasible
    distance: np.ndarray # nan where infeasible

    def __len__( self ):
        return self.supports.shape[0]

    def outcome( self, c ):
        if self.rank[c] < self.supports.shape[1]:
            return RANK_DEFICIENT
        return FEASIBLE if self.feasible[c] else INFEASIBLE_SIGN

    def pseudo( self, c ):
        if self.rank[c] < self.supports.shape[1]:
            return PseudoProbability(None, False, rank_deficient=True)
        if not self.feasible[c]:
            return PseudoProbability(self.values[c].copy(), False)
        return PseudoProbability(self.values[c].copy(), True, float(self.distance[c]), self.weights[c].copy())


def inner_products( r_o, state_set ):
    """Gram matrix R^T R of the set and the overlaps R^T r_o."""
    check_same_dim(r_o, state_set)
    R = state_set.matrix
    return R.T @ R, R.T @ r_o.coeffs

def assemble( gram, rhs, supports ):
    # rows i < K: (r_i - r_K)^T r_j ; last row: the normalization constraint
    sub = gram[supports[:, :, None], supports[:, None, :]]
    A = sub - sub[:, -1:, :]
    A[:, -1, :] = 1.0
    B = rhs[supports] - rhs[supports[:, -1]][:, None]
    B[:, -1] = 1.0
    return A, B

def ranks( A, rank_rtol ):
    singular = np.linalg.svd(A, compute_uv=False)
    return np.sum(singular > rank_rtol * singular[:, :1], axis=1)

def lu_solve_batch( A, B ):
    try:
        return np.linalg.solve(A, B[..., None])[..., 0]
    except np.linalg.LinAlgError:
        # an exactly singular pivot slipped through the rank gate; isolate it
        values = np.full(B.shape, np.nan)
        for c in range(A.shape[0]):
            try:
                values[c] = np.linalg.solve(A[c], B[c])
            except np.linalg.LinAlgError:
                logger.debug("singular system despite rank gate; treating as rank deficient")
        return values

def finish( values, solved, vectors, target, supports, feasibility_tol ):
    """Feasibility test, clamping, renormalization and distances for solved systems."""
    C, K = supports.shape
    with np.errstate(invalid='ignore'):
        feasible = solved & np.all(values >= -feasibility_tol, axis=1) & (np.abs(values.sum(axis=1) - 1) <= NORMALIZATION_TOL)
    weights = np.full((C, K), np.nan)
    distance = np.full(C, np.nan)
    if np.any(feasible):
        w = np.clip(values[feasible], 0.0, None)
        w = w / w.sum(axis=1, keepdims=True)
        mix = np.einsum('mck,ck->cm', vectors[:, supports[feasible]], w)
        residual = target[None, :] - mix
        weights[feasible] = w
        distance[feasible] = 0.5 * np.einsum('cm,cm->c', residual, residual)
    return feasible, weights, distance

def solve_assembled( A, B, rank, vectors, target, supports, feasibility_tol ):
    C, K = supports.shape
    solved = rank == K
    values = np.full((C, K), np.nan)
    if np.any(solved):
        values[solved] = lu_solve_batch(A[solved], B[solved])
    solved = solved & np.all(np.isfinite(values), axis=1)
    rank = np.where(solved, rank, np.minimum(rank, K - 1))
    feasible, weights, distance = finish(values, solved, vectors, target, supports, feasibility_tol)
    return LevelResult(supports, values, rank, feasible, weights, distance)

def solve_level( gram, rhs, vectors, target, supports, feasibility_tol=1e-10, rank_rtol=1e-10 ):
    """Solve the stationarity system on every row of supports (C x K, increasing indices)."""
    supports = np.asarray(supports, dtype=np.intp)
    assert(supports.ndim == 2 and supports.shape[1] >= 1), "supports must be a C x K index array"
    A, B = assemble(gram, rhs, supports)
    return solve_assembled(A, B, ranks(A, rank_rtol), vectors, target, supports, feasibility_tol)

def check_support( support, N ):
    support = tuple(int(i) for i in support)
    if len(support) == 0:
        raise EmptySupport("a support needs at least one state")
    for i in support:
        if not 0 <= i < N:
            raise SupportIndexError(f"support index {i} outside 0..{N-1}")
    if any(a >= b for a, b in zip(support, support[1:])):
        raise InvalidParameter(f"support {support} is not strictly increasing")
    return support

def build_system( r_o, state_set, support, rank_rtol=1e-10 ):
    support = check_support(support, len(state_set))
    gram, rhs = inner_products(r_o, state_set)
    rows = np.array([support], dtype=np.intp)
    A, B = assemble(gram, rhs, rows)
    rank = int(ranks(A, rank_rtol)[0])
    return SupportSystem(support, A[0], B[0], rank, gram[np.ix_(support, support)])

def solve_support( system, r_o, state_set, feasibility_tol=1e-10 ):
    rows = np.array([system.support], dtype=np.intp)
    result = solve_assembled(system.A[None], system.B[None], np.array([system.rank]), state_set.matrix, r_o.coeffs, rows, feasibility_tol)
    return result.pseudo(0)

def pseudo_from_values( values, vectors, target, feasibility_tol=1e-10 ):
    values = np.asarray(values, dtype=np.float64)
    K = values.size
    supports = np.arange(K, dtype=np.intp)[None]
    feasible, weights, distance = finish(values[None], np.array([True]), vectors, target, supports, feasibility_tol)
    if not feasible[0]:
        return PseudoProbability(values, False)
    return PseudoProbability(values, True, float(distance[0]), weights[0])

def closed_k2( r_o, r_1, r_2, feasibility_tol=1e-10 ):
    for r in (r_1, r_2):
        check_same_dim(r_o, r)
    e = r_1.coeffs - r_2.coeffs
    denominator = e @ e
    if denominator <= DEGENERACY_TOL:
        raise DegeneratePair(f"states coincide (|r_1 - r_2|^2 = {denominator:.3e})")
    p1 = (r_o.coeffs - r_2.coeffs) @ e / denominator
    vectors = np.array([r_1.coeffs, r_2.coeffs]).T
    return pseudo_from_values([p1, 1 - p1], vectors, r_o.coeffs, feasibility_tol)

def closed_k3( r_o, r_1, r_2, r_3, feasibility_tol=1e-10 ):
    for r in (r_1, r_2, r_3):
        check_same_dim(r_o, r)
    o, x1, x2, x3 = r_o.coeffs, r_1.coeffs, r_2.coeffs, r_3.coeffs
    a = x1 - x2
    b = x2 - x3
    denominator = (a @ a) * ((x3 - x2) @ (x3 - x2)) - (a @ (x3 - x2))**2
    if denominator <= DEGENERACY_TOL:
        raise DegenerateTriple(f"states are collinear (denominator {denominator:.3e})")
    # a^T [u v^T - v u^T] w written as (a.u)(v.w) - (a.v)(u.w)
    c = o - x2
    p1 = ((a @ c) * (b @ b) - (a @ b) * (c @ b)) / denominator
    e = x1 - x3
    f = o - x1
    p2 = ((a @ e) * (f @ e) - (a @ f) * (e @ e)) / denominator
    vectors = np.array([x1, x2, x3]).T
    return pseudo_from_values([p1, p2, 1 - p1 - p2], vectors, o, feasibility_tol)

def stationarity_gaps( weights, vectors, target ):
    """lambda_i = g_i - sum_j p_j g_j with g_i = r_i^T (sigma - r_o); nonnegative at the optimum."""
    weights = np.asarray(weights, dtype=np.float64)
    g = vectors.T @ (vectors @ weights - target)
    return g - weights @ g
