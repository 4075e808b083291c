from functools import lru_cache

import numpy as np

from config import *


class HermitianBasis:
    """Orthonormal Hermitian basis of d x d operators, generalized Gell-Mann order.

    Index 0 is I/sqrt(d); then the symmetric off-diagonal pairs, the antisymmetric
    pairs (both j < k, row-major) and the d-1 diagonal traceless matrices.
    """

    def __init__( self, dim ):
        if dim < 2:
            raise InvalidDimension(f"operator basis needs d >= 2, got {dim}")
        self.dim = dim
        stack = np.array(HermitianBasis.gell_mann(dim))
        stack.flags.writeable = False
        self.stack = stack

    @property
    def elements( self ):
        return list(self.stack)

    @property
    def size( self ):
        return self.dim * self.dim

    @staticmethod
    def gell_mann( d ):
        elements = [np.eye(d, dtype=np.complex128) / np.sqrt(d)]
        pairs = [(j, k) for j in range(d) for k in range(j+1, d)]
        for j, k in pairs:
            sym = np.zeros((d, d), dtype=np.complex128)
            sym[j, k] = sym[k, j] = 1 / np.sqrt(2)
            elements = elements + [sym]
        for j, k in pairs:
            anti = np.zeros((d, d), dtype=np.complex128)
            anti[j, k] = -1j / np.sqrt(2)
            anti[k, j] = 1j / np.sqrt(2)
            elements = elements + [anti]
        for l in range(1, d):
            diagonal = np.zeros(d, dtype=np.complex128)
            diagonal[:l] = 1
            diagonal[l] = -l
            elements = elements + [np.diag(diagonal) / np.sqrt(l * (l + 1))]
        return elements

    def gram( self ):
        # Tr(X_i X_j); elements are Hermitian so no conjugation is needed
        return np.einsum('iab,jba->ij', self.stack, self.stack)

    def check_matrix( self, matrix ):
        matrix = np.asarray(matrix, dtype=np.complex128)
        if matrix.shape != (self.dim, self.dim):
            raise DimensionMismatch(f"expected a {self.dim}x{self.dim} matrix, got shape {matrix.shape}")
        deviation = np.max(np.abs(matrix - matrix.conj().T))
        if deviation > HERMITIAN_TOL:
            raise NotHermitian(f"matrix deviates from its adjoint by {deviation:.3e}")
        return (matrix + matrix.conj().T) / 2

    def vectorize( self, matrix ):
        matrix = self.check_matrix(matrix)
        coeffs = np.einsum('kab,ba->k', self.stack, matrix)
        residue = np.max(np.abs(coeffs.imag))
        assert(residue <= IMAGINARY_TOL * max(1.0, np.max(np.abs(coeffs.real)))), f"imaginary residue {residue:.3e} after symmetrization"
        return coeffs.real.copy()

    def devectorize( self, coeffs ):
        coeffs = np.asarray(coeffs, dtype=np.float64)
        if coeffs.shape != (self.size,):
            raise DimensionMismatch(f"expected {self.size} coefficients, got shape {coeffs.shape}")
        return np.einsum('k,kab->ab', coeffs, self.stack)


@lru_cache(maxsize=None)
def build_basis( d ):
    return HermitianBasis(d)

def vectorize( matrix, basis ):
    return basis.vectorize(matrix)

def devectorize( coeffs, basis ):
    return basis.devectorize(coeffs)

def dimension_of( length ):
    d = int(round(np.sqrt(length)))
    if d < 2 or d * d != length:
        raise InvalidDimension(f"coefficient length {length} is not d^2 for any d >= 2")
    return d
