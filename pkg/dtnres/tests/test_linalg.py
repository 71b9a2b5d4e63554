# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.

import pickle

import numpy as np
import numpy.testing as npt
import scipy.sparse as sp

from dtnres import linalg
from dtnres.errors import SingularMatrixError


def _test_matrix(n=50, seed=1234):
    rng = np.random.RandomState(seed)
    A = sp.random(n, n, density=0.1, random_state=rng) + 1j * sp.random(n, n, density=0.1, random_state=rng)
    return linalg.as_csr(A + 10 * sp.identity(n))


def test_as_csr():
    A = sp.coo_matrix(([1., 2., 3.], ([0, 0, 1], [1, 1, 0])), shape=(2, 2))
    csr = linalg.as_csr(A)
    assert csr.dtype == complex
    assert csr.has_sorted_indices
    assert csr.nnz == 2
    npt.assert_allclose(csr.toarray(), [[0, 3], [3, 0]])


def test_factorize_and_solve():
    A = _test_matrix()
    lu = linalg.factorize(A)
    b = linalg.random_vector(A.shape[0], seed=1)
    x = lu.solve(b)
    residual = np.linalg.norm(A @ x - b)
    assert residual <= 1e-10 * (lu.norm * np.linalg.norm(x) + np.linalg.norm(b))

    # Against dense elimination.
    x_ref = np.linalg.solve(A.toarray(), b)
    assert np.linalg.norm(x - x_ref) <= 1e-9 * np.linalg.norm(x_ref)

    # Block of right-hand sides.
    B = np.stack([b, 2 * b, 1j * b], axis=1)
    X = lu.solve(B)
    npt.assert_allclose(X[:, 1], 2 * x)
    npt.assert_allclose(X[:, 2], 1j * x)

    npt.assert_raises(ValueError, lu.solve, np.ones(3))


def test_singular_matrices():
    A = _test_matrix().tolil()
    A[3, :] = 0
    npt.assert_raises(SingularMatrixError, linalg.factorize, A.tocsr())

    D = sp.diags([1., 2., 1e-15, 3.]).tocsr()
    try:
        linalg.factorize(D)
    except SingularMatrixError as e:
        assert e.pivot is not None
    else:
        assert False, "Expecting a SingularMatrixError"

    # Worker processes send errors back through pipes.
    error = pickle.loads(pickle.dumps(SingularMatrixError(3)))
    assert error.pivot == 3 and "pivot 3" in str(error)


def test_dense_lu():
    M = np.array([[2., 1j], [1j, 3.]])
    lu = linalg.dense_lu(M)
    x = lu.solve(np.array([1., 2.]))
    npt.assert_allclose(M @ x, [1., 2.])

    npt.assert_raises(SingularMatrixError, linalg.dense_lu, np.array([[1., 2.], [2., 4.]]))
    assert linalg.dense_lu(np.zeros((0, 0))).solve(np.zeros(0)).shape == (0,)


def test_random_vector():
    x = linalg.random_vector(100, seed=42)
    npt.assert_array_equal(x, linalg.random_vector(100, seed=42))
    assert x.dtype == complex
    assert np.all(np.abs(x.real) <= 1) and np.all(np.abs(x.imag) <= 1)
    assert not np.array_equal(x, linalg.random_vector(100, seed=43))


def test_sparse_products():
    A = _test_matrix(20, seed=7)
    x = linalg.random_vector(20, seed=3)
    npt.assert_allclose(A @ x, A.toarray() @ x, atol=1e-13)
    npt.assert_array_equal(linalg.as_csr(sp.identity(20)) @ x, x)
    npt.assert_array_equal(linalg.as_csr(sp.csr_matrix((20, 20))) @ x, 0)
