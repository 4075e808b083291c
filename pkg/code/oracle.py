import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigvalsh

from states import *

logger = logging.getLogger(__name__)

PROJECTED_GRADIENT = "projected_gradient"
GRID = "grid"

GRID_MAX_STATES = 4
GRID_MAX_RESOLUTION = 400


@dataclass(frozen=True)
class OracleResult:
    distance: float
    weights: np.ndarray
    iterations: int
    converged: bool
    method: str
    history: tuple = field(default=(), repr=False)


def project_simplex( v ):
    """Euclidean projection onto the probability simplex (sort and threshold)."""
    v = np.asarray(v, dtype=np.float64)
    u = np.sort(v)[::-1]
    cumulative = np.cumsum(u)
    ks = np.arange(1, v.size + 1)
    rho = np.nonzero(u + (1 - cumulative) / ks > 0)[0][-1]
    theta = (1 - cumulative[rho]) / (rho + 1)
    return np.maximum(v + theta, 0.0)

def project_simplex_bisection( v, tol=1e-15, max_iter=200 ):
    # find theta with sum(max(v + theta, 0)) = 1 by bisection
    v = np.asarray(v, dtype=np.float64)
    lo = -np.max(v)
    hi = 1 - np.min(v)
    for i in range(max_iter):
        theta = (lo + hi) / 2
        if np.maximum(v + theta, 0.0).sum() > 1:
            hi = theta
        else:
            lo = theta
        if hi - lo < tol:
            break
    return np.maximum(v + (lo + hi) / 2, 0.0)

def residual_distance( weights, vectors, target ):
    residual = target - vectors @ weights
    return 0.5 * float(residual @ residual)

def projected_gradient( r_o, state_set, tol=1e-12, max_iter=200000, record_history=False, warn=True ):
    if tol <= 0:
        raise InvalidParameter(f"oracle tolerance must be positive, got {tol}")
    check_same_dim(r_o, state_set)
    R = state_set.matrix
    target = r_o.coeffs
    H = R.T @ R
    c = R.T @ target
    L = eigvalsh(H)[-1]
    N = len(state_set)

    p = np.full(N, 1.0 / N)
    objective = residual_distance(p, R, target)
    best, best_objective = p, objective
    history = [objective] if record_history else None
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        gradient = H @ p - c
        p_next = project_simplex(p - gradient / L)
        next_objective = residual_distance(p_next, R, target)
        mapping = L * np.linalg.norm(p - p_next)
        decrease = objective - next_objective
        p, objective = p_next, next_objective
        if record_history:
            history.append(objective)
        if objective < best_objective:
            best, best_objective = p, objective
        if decrease < tol and mapping < np.sqrt(tol):
            converged = True
            break
    if not converged and warn:
        logger.warning("projected gradient stopped after %d iterations without converging", iterations)
    logger.debug("projected gradient: %d iterations, distance %.3e", iterations, best_objective)
    return OracleResult(best_objective, best, iterations, converged, PROJECTED_GRADIENT, tuple(history or ()))

def compositions( total, parts ):
    """All nonnegative integer vectors of length parts summing to total, in lexicographic order."""
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    blocks = []
    for first in range(total + 1):
        rest = compositions(total - first, parts - 1)
        blocks = blocks + [np.hstack([np.full((rest.shape[0], 1), first, dtype=np.int64), rest])]
    return np.vstack(blocks)

def grid_bruteforce( r_o, state_set, resolution ):
    N = len(state_set)
    if N > GRID_MAX_STATES or resolution > GRID_MAX_RESOLUTION:
        raise GridTooLarge(f"grid search is capped at N <= {GRID_MAX_STATES} and resolution <= {GRID_MAX_RESOLUTION}, got N={N}, resolution={resolution}")
    if resolution < 1:
        raise InvalidParameter(f"grid resolution must be positive, got {resolution}")
    check_same_dim(r_o, state_set)
    R = state_set.matrix
    target = r_o.coeffs

    best, best_objective = None, np.inf
    evaluated = 0
    # one block per leading part keeps memory at a single slab of the grid
    for first in range(resolution + 1) if N > 1 else [resolution]:
        if N == 1:
            grid = np.array([[resolution]], dtype=np.int64)
        else:
            tail = compositions(resolution - first, N - 1)
            grid = np.hstack([np.full((tail.shape[0], 1), first, dtype=np.int64), tail])
        weights = grid / resolution
        residual = target[None, :] - weights @ R.T
        objective = 0.5 * np.einsum('cm,cm->c', residual, residual)
        i = int(np.argmin(objective))
        evaluated += grid.shape[0]
        if objective[i] < best_objective:
            best, best_objective = weights[i], float(objective[i])
    return OracleResult(best_objective, best, evaluated, True, GRID)
