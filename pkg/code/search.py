import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import combinations, islice
from math import comb

import numpy as np
from scipy.linalg import null_space

from kkt import *
from oracle import *

logger = logging.getLogger(__name__)

BUDGET_FALLBACK = "budget-fallback"


@dataclass(frozen=True)
class ApproxSolution:
    distance: float
    weights: np.ndarray # length N, zero off the support
    support: tuple
    minimal_n: int
    evaluated_supports: int
    case_trace: tuple = field(default=(), repr=False)
    certified: bool = True
    fallback: bool = False
    stop_level: int = 0

    def trace_summary( self ):
        counts = {}
        for support, outcome in self.case_trace:
            counts[outcome] = counts.get(outcome, 0) + 1
        return counts


@dataclass(frozen=True)
class SweepRecord:
    k: float
    distance: float
    minimal_n: int
    support: tuple
    weights: tuple # aligned with support


@dataclass
class Candidate:
    distance: float
    support: tuple
    weights: np.ndarray
    certified: bool = False


def caratheodory_reduce( weights, vectors ):
    """Shrink a convex combination to at most d^2 members without moving the mixture.

    Returns the reduced weights and the indices (into the input) they belong to.
    """
    q = np.array(weights, dtype=np.float64)
    if len(vectors) != q.size:
        raise InvalidParameter(f"{q.size} weights for {len(vectors)} vectors")
    if np.any(q < 0) or abs(q.sum() - 1) > NORMALIZATION_TOL:
        raise InvalidParameter("weights must be nonnegative and sum to 1")
    dim = vectors[0].dim
    for v in vectors:
        check_same_dim(vectors[0], v)
    indices = list(range(q.size))
    R = np.array([v.coeffs for v in vectors]).T
    while len(indices) > dim * dim:
        # more columns than rows, so a nontrivial dependency exists; its sum is zero
        # because every column starts with 1/sqrt(d)
        l = null_space(R[:, indices])[:, 0]
        if not np.any(l > 0):
            l = -l
        positive = l > 1e-14 * np.max(np.abs(l))
        ratios = np.full(l.size, np.inf)
        ratios[positive] = q[positive] / l[positive]
        j = int(np.argmin(ratios))
        q = np.clip(q - ratios[j] * l, 0.0, None)
        q[j] = 0.0
        q = np.delete(q, j)
        indices = indices[:j] + indices[j+1:]
    return q, indices


class SupportSearch:
    """Per-solve state: the deduplicated set, inner products, memo, trace and counter."""

    def __init__( self, r_o, state_set, config ):
        self.config = config
        self.r_o = r_o
        self.total = len(state_set)
        self.unique, self.kept = state_set.deduplicate()
        self.N = len(self.unique)
        self.vectors = self.unique.matrix
        self.target = r_o.coeffs
        self.gram, self.rhs = inner_products(r_o, self.unique)
        self.memo = {}
        self.trace = []
        self.evaluated = 0

    def original( self, support ):
        return tuple(self.kept[i] for i in support)

    def record( self, result ):
        self.evaluated += len(result)
        if not self.config.record_trace:
            return
        for c, support in enumerate(result.supports.tolist()):
            self.trace.append((self.original(support), result.outcome(c)))

    def evaluate( self, supports ):
        result = solve_level(self.gram, self.rhs, self.vectors, self.target, supports,
                             self.config.feasibility_tol, self.config.rank_rtol)
        self.record(result)
        return result

    def chunks( self, members, K ):
        iterator = combinations(members, K)
        while True:
            block = list(islice(iterator, self.config.chunk_size))
            if not block:
                return
            yield np.array(block, dtype=np.intp)

    def evaluate_level( self, members, K ):
        if self.config.workers > 1:
            with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                results = list(pool.map(lambda s: solve_level(self.gram, self.rhs, self.vectors, self.target, s,
                                                              self.config.feasibility_tol, self.config.rank_rtol),
                                        self.chunks(members, K)))
            for result in results:
                self.record(result)
            return results
        return [self.evaluate(s) for s in self.chunks(members, K)]

    def certify( self, result ):
        """Candidates for the feasible rows of result, with the KKT dual-feasibility verdict."""
        rows = np.nonzero(result.feasible)[0]
        if rows.size == 0:
            return []
        W = np.zeros((rows.size, self.N))
        np.put_along_axis(W, result.supports[rows], result.weights[rows], axis=1)
        g = (W @ self.vectors.T - self.target[None, :]) @ self.vectors
        gaps = g - np.sum(W * g, axis=1, keepdims=True)
        certified = np.all(gaps >= -self.config.certificate_tol, axis=1)
        return [Candidate(float(result.distance[c]), tuple(result.supports[c].tolist()), result.weights[c].copy(), bool(ok))
                for c, ok in zip(rows, certified)]

    def lookup( self, supports ):
        """Memoized evaluation of a list of equal-size support tuples."""
        missing = [s for s in supports if s not in self.memo]
        if missing:
            result = self.evaluate(np.array(missing, dtype=np.intp))
            for c, s in enumerate(missing):
                self.memo[s] = result.pseudo(c)
        return [(s, self.memo[s]) for s in supports]


def ties( candidates, tol ):
    best = min(c.distance for c in candidates)
    return [c for c in candidates if c.distance <= best + tol]


class Approximator:
    def __init__( self, config=None ):
        self.config = SearchConfig() if config is None else config

    def solve( self, r_o, state_set ):
        if len(state_set) == 0:
            raise EmptyStateSet("cannot approximate with an empty state set")
        check_same_dim(r_o, state_set)
        config = self.config
        search = SupportSearch(r_o, state_set, config)
        everyone = tuple(range(search.N))

        members = everyone
        if config.stop_rule == "certified":
            members = self.active_members(search)
        levels = self.descend(search, members)
        if levels is not None and levels[0] is None and members != everyone:
            logger.debug("no certificate inside the active set; enumerating all %d states", search.N)
            levels = self.descend(search, everyone)
        if levels is None:
            return self.fallback(search)
        chosen, pool, stop_level = levels

        is_certified = True
        if chosen is None:
            if config.stop_rule == "certified":
                logger.warning("no support passed the optimality certificate; returning the best feasible one")
                is_certified = False
            chosen = pool
        elif config.stop_rule == "first-feasible":
            is_certified = any(c.certified for c in chosen)

        best = self.minimal_support(search, chosen)
        weights = np.zeros(len(state_set))
        weights[list(search.original(best.support))] = best.weights
        logger.info("solved: distance %.6e with %d state(s) after %d supports", best.distance, len(best.support), search.evaluated)
        return ApproxSolution(best.distance, weights, search.original(best.support), len(best.support),
                              search.evaluated, tuple(search.trace), is_certified, False, stop_level)

    def active_members( self, search ):
        """Indices whose stationarity gap vanishes at the oracle's mixture.

        The nearest mixture is unique and every optimal support carries positive weight
        only on zero-gap states, so a certified support always lies inside this set.
        """
        oracle = projected_gradient(search.r_o, search.unique, max_iter=self.config.seed_iterations, warn=False)
        gaps = stationarity_gaps(oracle.weights, search.vectors, search.target)
        members = tuple(int(i) for i in np.nonzero(gaps <= self.config.seed_gap_tol)[0])
        logger.debug("oracle seed: %d of %d states in the active set", len(members), search.N)
        return members

    def descend( self, search, members ):
        """Level descent over the supports drawn from members.

        Returns (chosen, pool, stop_level), with chosen None when no level met the stop
        rule, or None when the next level would exceed the support budget.
        """
        config = self.config
        K_max = min(len(members), search.r_o.dim * search.r_o.dim)
        pool = [] # feasible candidates within tie_tol of the best seen
        for K in range(K_max, 0, -1):
            count = comb(len(members), K)
            if search.evaluated + count > config.budget:
                logger.warning("support budget %d exhausted before level %d; falling back to the oracle", config.budget, K)
                return None
            level = []
            for result in search.evaluate_level(members, K):
                level = level + search.certify(result)
            logger.debug("level %d: %d supports, %d feasible", K, count, len(level))
            if level:
                pool = ties(pool + level, config.tie_tol)
            certified = [c for c in level if c.certified]
            if config.stop_rule == "certified" and certified:
                return ties(certified, config.tie_tol), pool, K
            if config.stop_rule == "first-feasible" and level:
                return ties(level, config.tie_tol), pool, K
        return None, pool, 0

    def minimal_support( self, search, chosen ):
        """Smallest support reaching the optimum.

        A feasible support has full rank, so its barycentric weights are unique and the
        only subsets reaching the same mixture keep every positive weight. Each optimal
        support is therefore shrunk by dropping weights below tie_tol and re-solving,
        as long as the re-solved distance stays within tie_tol of the optimum.
        """
        optimum = min(c.distance for c in chosen)
        tol = self.config.tie_tol
        reduced = []
        for c in chosen:
            if c.distance > optimum + tol:
                continue
            while True:
                keep = tuple(s for s, w in zip(c.support, c.weights) if w > tol)
                if len(keep) == len(c.support):
                    break
                pseudo = search.lookup([keep])[0][1]
                if not (pseudo.feasible and pseudo.distance <= optimum + tol):
                    break
                c = Candidate(pseudo.distance, keep, pseudo.weights, c.certified)
            reduced = reduced + [c]
        return min(reduced, key=lambda c: (len(c.support), c.support))

    def fallback( self, search ):
        oracle = projected_gradient(search.r_o, search.unique)
        reduced, indices = caratheodory_reduce(oracle.weights, list(search.unique.members))
        kept = [(i, w) for w, i in zip(reduced, indices) if w > 0]
        support = tuple(i for i, w in kept)
        weights = np.array([w for i, w in kept])
        weights = weights / weights.sum()
        best = Candidate(residual_distance(weights, search.vectors[:, list(support)], search.target), support, weights)

        # the reduced support goes through the same certificate and descent as an enumerated one
        closed = search.certify(search.evaluate(np.array([support], dtype=np.intp)))
        if closed and closed[0].distance <= best.distance + self.config.tie_tol:
            best = self.minimal_support(search, closed)
        original = search.original(best.support)
        search.trace.append((original, BUDGET_FALLBACK))
        full = np.zeros(search.total)
        full[list(original)] = best.weights
        return ApproxSolution(best.distance, full, original, len(best.support), search.evaluated,
                              tuple(search.trace), best.certified, True, 0)

    def profile( self, family, state_set, k_grid ):
        k_grid = [float(k) for k in k_grid]
        for k in k_grid:
            if not 0 <= k <= 1:
                raise InvalidParameter(f"sweep parameter k={k} outside [0, 1]")
        quiet = Approximator(replace(self.config, record_trace=False, workers=1))

        def row( k ):
            solution = quiet.solve(interpolate(family, k), state_set)
            support = solution.support
            return SweepRecord(k, solution.distance, solution.minimal_n, support, tuple(float(solution.weights[i]) for i in support))

        if self.config.workers > 1:
            with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                return list(pool.map(row, k_grid))
        return [row(k) for k in k_grid]


def solve( r_o, state_set, config=None ):
    return Approximator(config).solve(r_o, state_set)

def minimal_support_profile( family, state_set, k_grid, config=None ):
    return Approximator(config).profile(family, state_set, k_grid)

def uniform_grid( steps ):
    if steps < 2:
        raise InvalidParameter(f"a k grid needs at least 2 points, got {steps}")
    return [i / (steps - 1) for i in range(steps)]
