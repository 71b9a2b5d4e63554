# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.


"""
Sparse complex linear algebra on top of `scipy.sparse`.
"""

from typing import Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import splu, norm as sparse_norm

from dtnres.errors import SingularMatrixError


#: |U_ii| <= PIVOT_TOLERANCE * max |U_jj| means singular to working precision.
PIVOT_TOLERANCE = 1e-13


def as_csr(A) -> sp.csr_matrix:
    """ Complex CSR copy of `A` with sorted, duplicate-free column indices. """
    A = sp.csr_matrix(A, dtype=complex)
    A.sum_duplicates()
    A.sort_indices()
    return A


def _check_pivots(diagonal: np.ndarray) -> None:
    magnitude = np.abs(diagonal)
    largest = magnitude.max() if magnitude.size else 0.
    if largest == 0:
        raise SingularMatrixError(0)

    small = np.flatnonzero(magnitude <= PIVOT_TOLERANCE * largest)
    if len(small) > 0:
        raise SingularMatrixError(int(small[0]))


class Factorization:
    """
    Sparse LU factorization (SuperLU with COLAMD ordering).

    Attributes:
        shape: Shape of the factorized matrix.
        norm: Frobenius norm of the factorized matrix.
    """

    def __init__(self, A) -> None:
        A = sp.csc_matrix(A, dtype=complex)
        self.shape = A.shape
        self.norm = sparse_norm(A) if A.nnz else 0.
        try:
            self._lu = splu(A, permc_spec="COLAMD")
        except RuntimeError as e:
            # SuperLU reports exact singularity this way.
            raise SingularMatrixError(None, "Matrix is exactly singular ({})".format(e))

        _check_pivots(self._lu.U.diagonal())

    def solve(self, b: np.ndarray) -> np.ndarray:
        """ Solve A x = b for a vector or an (n, m) block of right-hand sides. """
        b = np.asarray(b, dtype=complex)
        if b.shape[0] != self.shape[0]:
            raise ValueError("Expecting {} rows, got {}.".format(self.shape[0], b.shape[0]))

        return self._lu.solve(b)


def factorize(A) -> Factorization:
    """
    Factorize a square sparse matrix.

    Raises:
        SingularMatrixError: if A is singular to working precision.
    """
    return Factorization(A)


class DenseFactorization:
    """ LU factorization of a small dense matrix with the same contract. """

    def __init__(self, M: np.ndarray) -> None:
        M = np.asarray(M, dtype=complex)
        self.shape = M.shape
        if M.size == 0:
            self._lu = None
            return

        self._lu = scipy.linalg.lu_factor(M, check_finite=False)
        _check_pivots(np.diag(self._lu[0]))

    def solve(self, b: np.ndarray) -> np.ndarray:
        if self._lu is None:
            return np.asarray(b, dtype=complex)

        return scipy.linalg.lu_solve(self._lu, b, check_finite=False)


def dense_lu(M: np.ndarray) -> DenseFactorization:
    return DenseFactorization(M)


def random_vector(n: int, seed: Optional[int] = 0) -> np.ndarray:
    """ Complex vector whose real and imaginary parts are uniform in [-1, 1]. """
    rng = np.random.RandomState(seed)
    return rng.uniform(-1, 1, size=n) + 1j * rng.uniform(-1, 1, size=n)
