# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.


"""
The holomorphic matrix family B(k) = S1 - k² S2 - S3(k) and its resolvent.
"""

import logging
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import norm as sparse_norm

from dtnres.assemble import BoundaryFourier, assemble_stiffness, assemble_mass, boundary_fourier, assemble_load
from dtnres.dtn import DtNCoefficients, dtn_coefficients, dtn_block
from dtnres.errors import SingularMatrixError, PoleError, RefinementError
from dtnres.linalg import as_csr, factorize, dense_lu, random_vector
from dtnres.mesh import Mesh


logger = logging.getLogger("dtnres.nep")

SOLVERS = ("lowrank", "direct")

#: Relative shift of a start value where B is already singular.
SINGULAR_SHIFT = 1e-7


def _keys(A: sp.csr_matrix) -> np.ndarray:
    rows = np.repeat(np.arange(A.shape[0]), np.diff(A.indptr))
    return rows * A.shape[1] + A.indices


def _scale(values: np.ndarray, v: np.ndarray) -> np.ndarray:
    # Row scaling that works for vectors and (p, m) blocks alike.
    return (values * v.T).T


class DirectResolvent:
    """ B(k)^{-1} through a sparse LU of the materialized matrix. """

    def __init__(self, op: "ResonanceOperator", k: complex) -> None:
        self.k = k
        self._lu = factorize(op.materialize(k))

    def solve(self, b: np.ndarray) -> np.ndarray:
        return self._lu.solve(b)


class LowRankResolvent:
    """
    B(k)^{-1} from a sparse LU of A0 = S1 - k² S2 and the rank 2N+1 DtN update.

    With W = A0^{-1} U and C = I - Z UᵀW (Woodbury identity),
    B(k)^{-1} b = y + W C^{-1} Z Uᵀy where y = A0^{-1} b.
    No inverse of Z is involved, so vanishing z_n are harmless.
    """

    def __init__(self, op: "ResonanceOperator", k: complex) -> None:
        self.k = k
        self._op = op
        self._lu = factorize(op.S1 - (k ** 2) * op.S2)
        self._z = op.mode_values(op.coefficients(k).z)

        U = np.zeros((op.ndof, op.U.shape[1]), dtype=complex)
        U[op.fourier.dofs] = op.U
        self._W = self._lu.solve(U)
        capacitance = np.eye(op.U.shape[1]) - _scale(self._z, op.U.T @ self._W[op.fourier.dofs])
        self._capacitance = dense_lu(capacitance)

    def solve(self, b: np.ndarray) -> np.ndarray:
        y = self._lu.solve(b)
        correction = self._capacitance.solve(_scale(self._z, self._op.U.T @ y[self._op.fourier.dofs]))
        return y + self._W @ correction


class EigenPair:
    """
    Approximate eigenpair of B.

    Attributes:
        eigenvalue: Complex wavenumber λ.
        vector: Eigenvector u with ‖u‖₂ = 1.
        residual: ‖B(λ)u‖₂ / (‖B(λ)‖_F ‖u‖₂).
        iterations: Number of inverse iteration steps performed.
    """

    def __init__(self, eigenvalue: complex, vector: np.ndarray, residual: float, iterations: int = 0) -> None:
        self.eigenvalue = complex(eigenvalue)
        self.vector = vector
        self.residual = residual
        self.iterations = iterations

    def recompute_residual(self, op: "ResonanceOperator") -> float:
        self.residual = op.residual(self.eigenvalue, self.vector)
        return self.residual

    def __repr__(self) -> str:
        return "EigenPair(eigenvalue={:.10g}, residual={:.3g})".format(self.eigenvalue, self.residual)


class ResonanceOperator:
    """
    Matrix family B(k) = S1 - k² S2 - S3(k).

    The sparsity pattern of S1 ∪ S2 ∪ (Γ_R × Γ_R) is computed once; building
    B(k) only rewrites the values.

    Attributes:
        S1: Stiffness matrix.
        S2: Mass matrix.
        fourier: Boundary Fourier moments on Γ_R.
        R: Radius of Γ_R.
        N: Highest Fourier mode of the DtN map.
        ndof: Number of unknowns.
        solver: Resolvent strategy, "lowrank" (default) or "direct".
        mesh: Mesh the matrices were assembled on (None if unknown).
    """

    def __init__(self, S1, S2, fourier: BoundaryFourier, solver: str = "lowrank", mesh: Optional[Mesh] = None) -> None:
        if solver not in SOLVERS:
            raise ValueError("Unknown solver: {}. Expecting one of {}.".format(solver, SOLVERS))

        self.S1 = as_csr(S1)
        self.S2 = as_csr(S2)
        self.fourier = fourier
        self.R = fourier.R
        self.N = fourier.N
        self.ndof = self.S1.shape[0]
        self.solver = solver
        self.mesh = mesh
        if self.S2.shape != self.S1.shape or fourier.ndof != self.ndof:
            raise ValueError("Matrices and Fourier moments have inconsistent sizes.")

        self.U = fourier.modes()
        self._coefficients = None

        dofs = fourier.dofs
        rows, cols = np.meshgrid(dofs, dofs, indexing="ij")
        block_keys = (rows * self.ndof + cols).ravel()
        s1_keys, s2_keys = _keys(self.S1), _keys(self.S2)
        keys = np.unique(np.concatenate([s1_keys, s2_keys, block_keys]))

        self._indices = keys % self.ndof
        self._indptr = np.concatenate([[0], np.cumsum(np.bincount(keys // self.ndof, minlength=self.ndof))])
        self._s1_map = np.searchsorted(keys, s1_keys)
        self._s2_map = np.searchsorted(keys, s2_keys)
        self._block_map = np.searchsorted(keys, block_keys)

    @classmethod
    def from_mesh(cls, mesh: Mesh, R: float, N: int, solver: str = "lowrank") -> "ResonanceOperator":
        fourier = boundary_fourier(mesh, R, N)
        op = cls(assemble_stiffness(mesh), assemble_mass(mesh), fourier, solver=solver, mesh=mesh)
        logger.info("Operator with %d unknowns, %d on Γ_R, N=%d, R=%g", op.ndof, len(fourier.dofs), N, R)
        return op

    def coefficients(self, k: complex) -> DtNCoefficients:
        k = complex(k)
        if self._coefficients is None or self._coefficients.k != k:
            self._coefficients = dtn_coefficients(k, self.R, self.N)

        return self._coefficients

    @staticmethod
    def mode_values(values: np.ndarray) -> np.ndarray:
        """ Per-column values matching the columns of `U` (cos modes then sin modes). """
        return np.concatenate([values, values[1:]])

    def materialize(self, k: complex) -> sp.csr_matrix:
        """ B(k) as a complex symmetric CSR matrix. """
        k = complex(k)
        data = np.zeros(len(self._indices), dtype=complex)
        data[self._s1_map] += self.S1.data
        data[self._s2_map] -= k ** 2 * self.S2.data
        data[self._block_map] -= dtn_block(self.fourier, self.coefficients(k).z).ravel()
        return sp.csr_matrix((data, self._indices.copy(), self._indptr.copy()), shape=(self.ndof, self.ndof))

    def _boundary_apply(self, values: np.ndarray, x: np.ndarray) -> np.ndarray:
        y = np.zeros(x.shape, dtype=complex)
        y[self.fourier.dofs] = self.U @ _scale(self.mode_values(values), self.U.T @ x[self.fourier.dofs])
        return y

    def apply(self, k: complex, x: np.ndarray) -> np.ndarray:
        """ B(k)x without forming B(k). """
        k = complex(k)
        return self.S1 @ x - k ** 2 * (self.S2 @ x) - self._boundary_apply(self.coefficients(k).z, x)

    def derivative_apply(self, k: complex, x: np.ndarray) -> np.ndarray:
        """ B'(k)x = -2k S2 x - S3'(k) x. """
        k = complex(k)
        return -2 * k * (self.S2 @ x) - self._boundary_apply(self.coefficients(k).dz, x)

    def factorize(self, k: complex):
        """
        Resolvent solver at k.

        Raises:
            SingularMatrixError: if B(k) is singular to working precision.
            PoleError: if kR is a zero of a Hankel function.
        """
        k = complex(k)
        if self.solver == "lowrank":
            self.coefficients(k)
            try:
                return LowRankResolvent(self, k)
            except SingularMatrixError:
                # Either A0 or the capacitance is singular; only B(k) itself decides.
                logger.debug("Low-rank resolvent failed at k=%s, using the direct solver.", k)

        return DirectResolvent(self, k)

    def solve_linear(self, k: complex, rhs: np.ndarray) -> np.ndarray:
        """ x = B(k)^{-1} rhs. """
        rhs = np.asarray(rhs, dtype=complex)
        if not np.any(rhs):
            return np.zeros(rhs.shape, dtype=complex)

        return self.factorize(k).solve(rhs)

    def residual(self, k: complex, u: np.ndarray) -> float:
        scale = sparse_norm(self.materialize(k)) * np.linalg.norm(u)
        return float(np.linalg.norm(self.apply(k, u)) / scale)


def refine_eigenpair(op: ResonanceOperator, k0: complex, tol: float = 1e-12,
                     max_iter: int = 30, seed: int = 0, max_restarts: int = 3) -> EigenPair:
    """
    Refine an eigenvalue approximation by nonlinear inverse iteration.

    Each step computes u <- B(k)^{-1} B'(k) u (normalized) and updates k with
    the unconjugated Rayleigh functional k <- k - uᵀB(k)u / uᵀB'(k)u.

    A start value where B is singular to working precision is shifted once
    by SINGULAR_SHIFT·|k0| so that the returned vector is an iterate, never
    the random start.

    Raises:
        RefinementError: if the iteration breaks down more than
                         `max_restarts` times or does not converge within
                         `max_iter` steps.
    """
    k = complex(k0)
    restarts = 0
    u = random_vector(op.ndof, seed)
    u /= np.linalg.norm(u)
    previous_step = np.inf
    steps = 0
    shifted = False

    for iteration in range(1, max_iter + 1):
        try:
            resolvent = op.factorize(k)
        except SingularMatrixError:
            if steps > 0:
                logger.debug("B(%s) is singular to working precision.", k)
                return EigenPair(k, u, op.residual(k, u), iteration)

            if shifted:
                raise RefinementError("B(k) is singular at k={} and next to it.".format(k))

            # u is still the random start: move off the eigenvalue to get an eigenvector.
            logger.debug("B(%s) is singular before any step, shifting the start.", k)
            k += SINGULAR_SHIFT * abs(k)
            shifted = True
            continue
        except PoleError as e:
            raise RefinementError("Refinement reached a Hankel zero: {}".format(e))

        u = resolvent.solve(op.derivative_apply(k, u))
        u /= np.linalg.norm(u)

        Bprime_u = op.derivative_apply(k, u)
        denominator = u @ Bprime_u
        if abs(denominator) <= 1e-14 * np.linalg.norm(Bprime_u) or not np.isfinite(denominator):
            restarts += 1
            if restarts > max_restarts:
                raise RefinementError("Inverse iteration broke down near k={}.".format(k0))

            logger.debug("Inverse iteration broke down at k=%s, restarting (%d).", k, restarts)
            u = random_vector(op.ndof, seed + restarts)
            u /= np.linalg.norm(u)
            steps = 0
            continue

        step = (u @ op.apply(k, u)) / denominator
        k -= step
        steps += 1
        logger.debug("Inverse iteration %d: k=%s, |step|=%.3g", iteration, k, abs(step))

        # Steps stagnating at rounding level count as converged.
        stalled = abs(step) <= 1e3 * tol * abs(k) and abs(step) >= 0.5 * previous_step
        if abs(step) <= tol * abs(k) or stalled:
            return EigenPair(k, u, op.residual(k, u), iteration)

        previous_step = abs(step)

    raise RefinementError("Inverse iteration from k={} did not converge in {} steps.".format(k0, max_iter))


def solve_scattering(op: ResonanceOperator, k: float, d, mesh: Optional[Mesh] = None) -> np.ndarray:
    """ Scattered field u_h = B(k)^{-1} load(k, d) for a real wavenumber k > 0. """
    if not np.isreal(k) or np.real(k) <= 0:
        raise ValueError("Scattering problems need a real wavenumber k > 0, got {}.".format(k))

    mesh = mesh or op.mesh
    if mesh is None:
        raise ValueError("The operator does not know its mesh.")

    return op.solve_linear(float(np.real(k)), assemble_load(mesh, float(np.real(k)), d))


def l2_error(mesh: Mesh, S2, u_h: np.ndarray, u_ref: np.ndarray) -> float:
    """ Relative discrete L² error ‖u_h - u_ref‖ / ‖u_ref‖ measured with the mass matrix. """
    error = u_h - u_ref
    numerator = np.real(np.vdot(error, S2 @ error))
    denominator = np.real(np.vdot(u_ref, S2 @ u_ref))
    return float(np.sqrt(numerator / denominator))
