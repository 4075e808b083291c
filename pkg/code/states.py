import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh

from basis import *

logger = logging.getLogger(__name__)


class CoefficientVector:
    """Real coefficients of a Hermitian operator in the basis of its dimension."""

    def __init__( self, coeffs ):
        coeffs = np.array(coeffs, dtype=np.float64)
        if coeffs.ndim != 1:
            raise InvalidDimension(f"coefficient vector must be one-dimensional, got shape {coeffs.shape}")
        if not np.all(np.isfinite(coeffs)):
            raise InvalidParameter("coefficients must be finite")
        self.dim = dimension_of(coeffs.size)
        coeffs.flags.writeable = False
        self.coeffs = coeffs

    @staticmethod
    def from_matrix( matrix ):
        matrix = np.asarray(matrix)
        basis = build_basis(matrix.shape[0])
        return CoefficientVector(basis.vectorize(matrix))

    def to_matrix( self ):
        return build_basis(self.dim).devectorize(self.coeffs)

    def trace( self ):
        return self.coeffs[0] * np.sqrt(self.dim)

    def purity( self ):
        return float(self.coeffs @ self.coeffs)

    def __len__( self ):
        return self.coeffs.size

    def __sub__( self, other ):
        check_same_dim(self, other)
        return CoefficientVector(self.coeffs - other.coeffs)

    def __add__( self, other ):
        check_same_dim(self, other)
        return CoefficientVector(self.coeffs + other.coeffs)

    def __mul__( self, scalar ):
        return CoefficientVector(scalar * self.coeffs)

    def __eq__( self, other ):
        if not isinstance(other, CoefficientVector):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self.coeffs, other.coeffs)

    def __repr__( self ):
        return "CoefficientVector(" + ", ".join(f"{c:.6g}" for c in self.coeffs) + ")"


def check_same_dim( a, b ):
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimension {a.dim} does not match dimension {b.dim}")


class StateSet:
    def __init__( self, members, labels=None ):
        members = [m if isinstance(m, CoefficientVector) else CoefficientVector(m) for m in members]
        if len(members) == 0:
            raise EmptyStateSet("a state set needs at least one member")
        dim = members[0].dim
        for i, m in enumerate(members):
            if m.dim != dim:
                raise DimensionMismatch(f"member {i} has dimension {m.dim}, set has dimension {dim}")
        if labels is not None and len(labels) != len(members):
            raise InvalidParameter(f"{len(labels)} labels for {len(members)} states")
        self.dim = dim
        self.members = tuple(members)
        self.labels = None if labels is None else tuple(str(l) for l in labels)
        matrix = np.array([m.coeffs for m in members]).T
        matrix.flags.writeable = False
        self.matrix = matrix # d^2 x N, one column per member

    def __len__( self ):
        return len(self.members)

    def __getitem__( self, index ):
        return self.members[index]

    def __iter__( self ):
        return iter(self.members)

    def append( self, member, label=None ):
        labels = None
        if self.labels is not None:
            labels = list(self.labels) + [label if label is not None else f"state-{len(self)}"]
        return StateSet(list(self.members) + [member], labels)

    def subset( self, indices ):
        labels = None if self.labels is None else [self.labels[i] for i in indices]
        return StateSet([self.members[i] for i in indices], labels)

    def deduplicate( self, tol=1e-12 ):
        """Collapse members equal within tol; returns (unique set, kept original indices)."""
        kept = []
        for i, m in enumerate(self.members):
            if all(np.max(np.abs(m.coeffs - self.members[j].coeffs)) > tol for j in kept):
                kept = kept + [i]
        if len(kept) < len(self):
            logger.warning("collapsed %d duplicate state(s); keeping indices %s", len(self) - len(kept), kept)
            return self.subset(kept), kept
        return self, kept


@dataclass(frozen=True)
class TargetFamily:
    r_o1: CoefficientVector
    r_o2: CoefficientVector
    description: str = ""

    def __post_init__( self ):
        check_same_dim(self.r_o1, self.r_o2)

    @property
    def dim( self ):
        return self.r_o1.dim


@dataclass(frozen=True)
class ValidationReport:
    trace: float
    purity: float
    min_eigenvalue: float | None
    strict: bool
    problems: tuple

    @property
    def valid( self ):
        return len(self.problems) == 0


def validate_state( r, basis=None, strict=False ):
    basis = build_basis(r.dim) if basis is None else basis
    if len(r) != basis.size:
        raise DimensionMismatch(f"vector of length {len(r)} against a basis of size {basis.size}")
    trace = float(r.trace())
    purity = r.purity()
    problems = []
    if abs(trace - 1) > TRACE_TOL * np.sqrt(r.dim):
        problems = problems + [f"trace {trace:.6g} is not 1"]
    min_eigenvalue = None
    if strict:
        if purity > 1 + PURITY_TOL:
            problems = problems + [f"purity {purity:.6g} exceeds 1"]
        min_eigenvalue = float(eigvalsh(basis.devectorize(r.coeffs))[0])
        if min_eigenvalue < -EIGENVALUE_TOL:
            problems = problems + [f"minimum eigenvalue {min_eigenvalue:.6g} is negative"]
    return ValidationReport(trace, purity, min_eigenvalue, strict, tuple(problems))

def ginibre_density( d, rng ):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real

def random_density( d, seed ):
    if d < 2:
        raise InvalidDimension(f"random states need d >= 2, got {d}")
    rng = np.random.default_rng(seed)
    return CoefficientVector(build_basis(d).vectorize(ginibre_density(d, rng)))

def random_state_set( d, n, seed ):
    if d < 2:
        raise InvalidDimension(f"random states need d >= 2, got {d}")
    if n < 1:
        raise InvalidParameter(f"a random state set needs n >= 1, got {n}")
    rng = np.random.default_rng(seed)
    basis = build_basis(d)
    members = [CoefficientVector(basis.vectorize(ginibre_density(d, rng))) for i in range(n)]
    return StateSet(members, [f"ginibre-{seed}-{i}" for i in range(n)])

def interpolate( family, k ):
    if not 0 <= k <= 1:
        raise InvalidParameter(f"interpolation parameter k={k} outside [0, 1]")
    if k == 1:
        return family.r_o1
    if k == 0:
        return family.r_o2
    # anchored at r_o2 so equal leading coefficients stay bit-identical
    return family.r_o2 + (family.r_o1 - family.r_o2) * k

def hs_distance( r_a, r_b ):
    check_same_dim(r_a, r_b)
    diff = r_a.coeffs - r_b.coeffs
    return 0.5 * float(diff @ diff)
