# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.


"""
Truncated Dirichlet-to-Neumann map on the circle Γ_R.

On Γ_R the outgoing field satisfies ∂_r u = Σ_n k H_n'(kR)/H_n(kR) û_n e^{inθ}.
Written in the real Fourier basis of :py:class:`dtnres.assemble.BoundaryFourier`
this gives S3(k) = Σ_{n=0}^{N} z_n(k) (c_n c_nᵀ + s_n s_nᵀ) with

    z_n(k) = w_n kπR H_n'(kR) / H_n(kR),   w_0 = 1/2, w_n = 1.
"""

import numpy as np
import scipy.sparse as sp

from dtnres.assemble import BoundaryFourier
from dtnres.linalg import as_csr
from dtnres.specfun import hankel_ratios


class DtNCoefficients:
    """
    Coefficients z_n(k) and their k-derivatives for n = 0..N.

    Attributes:
        k: Complex wavenumber.
        R: Radius of Γ_R.
        N: Highest Fourier mode.
        z: Array of z_0..z_N.
        dz: Array of dz_0/dk..dz_N/dk.
    """

    def __init__(self, k: complex, R: float, N: int, z: np.ndarray, dz: np.ndarray) -> None:
        self.k = k
        self.R = R
        self.N = N
        self.z = z
        self.dz = dz

    def __repr__(self) -> str:
        return "DtNCoefficients(k={}, R={}, N={})".format(self.k, self.R, self.N)


def _weights(N: int) -> np.ndarray:
    weights = np.ones(N + 1)
    weights[0] = 0.5
    return weights


def dtn_coefficients(k: complex, R: float, N: int) -> DtNCoefficients:
    """
    Evaluate z_n(k) and z_n'(k) for every mode n = 0..N.

    With x = kR and r_n = H_{n-1}(x)/H_n(x) (r_0 = -H_1/H_0):

        z_n = w_n π (x r_n - n)
        z_n' = w_n π R (2n r_n - x - x r_n²)

    Raises:
        PoleError: if kR is a zero of some H_n.
    """
    x = complex(k) * R
    ratios = hankel_ratios(N, x)
    n = np.arange(N + 1)
    weights = _weights(N)
    z = weights * np.pi * (x * ratios - n)
    dz = weights * np.pi * R * (2 * n * ratios - x - x * ratios ** 2)
    return DtNCoefficients(complex(k), R, N, z, dz)


def dtn_coeff(n: int, k: complex, R: float) -> complex:
    return complex(dtn_coefficients(k, R, n).z[n])


def dtn_coeff_derivative(n: int, k: complex, R: float) -> complex:
    return complex(dtn_coefficients(k, R, n).dz[n])


def _check(fourier: BoundaryFourier, coeffs: DtNCoefficients) -> None:
    if coeffs.N != fourier.N:
        raise ValueError("Order mismatch: coefficients up to {}, moments up to {}.".format(coeffs.N, fourier.N))

    if not np.isclose(coeffs.R, fourier.R, rtol=1e-14, atol=0):
        raise ValueError("Radius mismatch: {} != {}.".format(coeffs.R, fourier.R))

    if fourier.cos.shape != (fourier.N + 1, len(fourier.dofs)):
        raise ValueError("Fourier moments do not match the boundary dofs.")


def dtn_block(fourier: BoundaryFourier, values: np.ndarray) -> np.ndarray:
    """ Σ values[n] (c_n c_nᵀ + s_n s_nᵀ) on the boundary dofs. """
    values = np.asarray(values)
    return (fourier.cos.T * values) @ fourier.cos + (fourier.sin.T * values) @ fourier.sin


def assemble_dtn(fourier: BoundaryFourier, coeffs: DtNCoefficients, embed: bool = False, derivative: bool = False):
    """
    Assemble S3(k), or S3'(k) when `derivative` is set.

    Returns:
        The dense symmetric block on the boundary dofs, or the global sparse
        matrix when `embed` is True.
    """
    _check(fourier, coeffs)
    block = dtn_block(fourier, coeffs.dz if derivative else coeffs.z)
    if not embed:
        return block

    rows, cols = np.meshgrid(fourier.dofs, fourier.dofs, indexing="ij")
    shape = (fourier.ndof, fourier.ndof)
    return as_csr(sp.coo_matrix((block.ravel(), (rows.ravel(), cols.ravel())), shape=shape))
