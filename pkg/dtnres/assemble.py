# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.


"""
P1 finite element matrices of the truncated exterior problem.
"""

import logging
import math
import warnings
from typing import Tuple

import numpy as np
import scipy.sparse as sp

from dtnres.errors import ResolutionWarning
from dtnres.linalg import as_csr
from dtnres.mesh import Mesh, GAMMA, GAMMA_R
from dtnres.mesh.mesh import triangle_edges


logger = logging.getLogger("dtnres.assemble")

MASS_LOCAL = np.array([[2., 1., 1.], [1., 2., 1.], [1., 1., 2.]]) / 12

#: Above this N h / R, Γ_R has fewer than two edges per period of cos(Nθ).
UNRESOLVED_RATIO = math.pi


def gauss_legendre(q: int) -> Tuple[np.ndarray, np.ndarray]:
    """ Gauss-Legendre nodes and weights on [0, 1]. """
    nodes, weights = np.polynomial.legendre.leggauss(q)
    return (nodes + 1) / 2, weights / 2


def _scatter(mesh: Mesh, local: np.ndarray) -> sp.csr_matrix:
    rows = np.repeat(mesh.triangles, 3, axis=1)
    cols = np.tile(mesh.triangles, (1, 3))
    shape = (mesh.nb_vertices, mesh.nb_vertices)
    return as_csr(sp.coo_matrix((local.ravel(), (rows.ravel(), cols.ravel())), shape=shape))


def assemble_stiffness(mesh: Mesh) -> sp.csr_matrix:
    """ S1[i, j] = ∫_Ω ∇φ_j · ∇φ_i. """
    p = mesh.vertices[mesh.triangles]
    # Edge opposite to local vertex i.
    opposite = np.stack([p[:, 2] - p[:, 1], p[:, 0] - p[:, 2], p[:, 1] - p[:, 0]], axis=1)
    areas = mesh.signed_areas()
    local = np.einsum("tid,tjd->tij", opposite, opposite) / (4 * areas)[:, None, None]
    return _scatter(mesh, local)


def assemble_mass(mesh: Mesh) -> sp.csr_matrix:
    """ S2[i, j] = ∫_Ω φ_j φ_i. """
    local = mesh.signed_areas()[:, None, None] * MASS_LOCAL
    return _scatter(mesh, local)


class BoundaryFourier:
    """
    Fourier moments of the hat functions living on Γ_R.

    c_n[i] = 1/(πR) ∫_{Γ_R} φ_i cos(nθ) ds and s_n[i] likewise with sin(nθ).

    Attributes:
        R: Radius of Γ_R.
        N: Highest Fourier mode.
        ndof: Number of mesh vertices.
        dofs: Sorted indices of the vertices on Γ_R.
        cos: Array (N+1, len(dofs)) of c_n restricted to `dofs`.
        sin: Array (N+1, len(dofs)) of s_n restricted to `dofs` (row 0 is zero).
    """

    def __init__(self, R: float, N: int, ndof: int, dofs: np.ndarray, cos: np.ndarray, sin: np.ndarray) -> None:
        self.R = R
        self.N = N
        self.ndof = ndof
        self.dofs = dofs
        self.cos = cos
        self.sin = sin

    @property
    def nb_boundary_dofs(self) -> int:
        return len(self.dofs)

    def _expand(self, values: np.ndarray) -> np.ndarray:
        full = np.zeros(self.ndof)
        full[self.dofs] = values
        return full

    def c(self, n: int) -> np.ndarray:
        return self._expand(self.cos[n])

    def s(self, n: int) -> np.ndarray:
        return self._expand(self.sin[n])

    def modes(self) -> np.ndarray:
        """ U = [c_0 .. c_N, s_1 .. s_N] on the boundary dofs, shape (len(dofs), 2N+1). """
        return np.concatenate([self.cos, self.sin[1:]]).T

    def restrict(self, x: np.ndarray) -> np.ndarray:
        return x[self.dofs]


def boundary_fourier(mesh: Mesh, R: float, N: int) -> BoundaryFourier:
    """
    Compute the Fourier moments of the Γ_R hat functions up to mode N.

    Every edge is integrated with Gauss-Legendre using
    max(4, ceil(2 + N h / R)) points; the angle is followed continuously
    along the edge. A log record notes N h / R > 1 (expected on the
    level 1 mesh with N = 20); a ResolutionWarning is issued only when
    Γ_R has fewer than two edges per period of mode N.
    """
    h = mesh.h
    ratio = N * h / R
    if ratio > 1:
        logger.warning("Mesh size h=%.3g gives N h / R = %.2f for N=%d on a circle of radius %g;"
                       " using more Gauss points per edge.", h, ratio, N, R)

    if ratio > UNRESOLVED_RATIO:
        msg = "Mesh size h={:.3g} cannot represent Fourier mode {} on a circle of radius {} (N h / R = {:.2f})."
        msg = msg.format(h, N, R, ratio)
        warnings.warn(msg, ResolutionWarning)

    q = max(4, int(math.ceil(2 + ratio)))
    t, w = gauss_legendre(q)

    dofs = mesh.boundary_nodes(GAMMA_R)
    edges = mesh.edges(GAMMA_R)
    start = mesh.vertices[edges[:, 0]]
    end = mesh.vertices[edges[:, 1]]
    lengths = np.linalg.norm(end - start, axis=1)

    za = start[:, 0] + 1j * start[:, 1]
    zb = end[:, 0] + 1j * end[:, 1]
    points = za[:, None] + t[None, :] * (zb - za)[:, None]
    theta = np.angle(za)[:, None] + np.angle(points / za[:, None])

    modes = np.arange(N + 1)[:, None, None]
    weights = (w[None, :] * lengths[:, None])[None]
    cos_nt = np.cos(modes * theta) * weights
    sin_nt = np.sin(modes * theta) * weights

    local_a = np.searchsorted(dofs, edges[:, 0])
    local_b = np.searchsorted(dofs, edges[:, 1])

    cos = np.zeros((N + 1, len(dofs)))
    sin = np.zeros((N + 1, len(dofs)))
    for moments, values in ((cos, cos_nt), (sin, sin_nt)):
        for n in range(N + 1):
            np.add.at(moments[n], local_a, values[n] @ (1 - t))
            np.add.at(moments[n], local_b, values[n] @ t)

    cos /= np.pi * R
    sin /= np.pi * R
    sin[0] = 0.

    logger.debug("Boundary Fourier moments: %d dofs, N=%d, %d Gauss points per edge", len(dofs), N, q)
    return BoundaryFourier(R, N, mesh.nb_vertices, dofs, cos, sin)


def plane_wave(k: complex, d, points: np.ndarray) -> np.ndarray:
    """ Incident field exp(i k d·x) travelling along the unit direction d. """
    d = np.asarray(d, dtype=float)
    d = d / np.linalg.norm(d)
    return np.exp(1j * k * (np.asarray(points) @ d))


def _gamma_normals(mesh: Mesh, edges: np.ndarray) -> np.ndarray:
    # Unit normals pointing from the obstacle into Ω, found from the triangle owning each edge.
    nb = mesh.nb_vertices
    all_edges = triangle_edges(mesh.triangles)
    owners = np.tile(np.arange(mesh.nb_triangles), 3)
    keys = all_edges[:, 0] * nb + all_edges[:, 1]
    order = np.argsort(keys)
    sorted_edges = np.sort(edges, axis=1)
    positions = order[np.searchsorted(keys[order], sorted_edges[:, 0] * nb + sorted_edges[:, 1])]
    triangles = mesh.triangles[owners[positions]]

    start = mesh.vertices[edges[:, 0]]
    end = mesh.vertices[edges[:, 1]]
    tangent = end - start
    normals = np.stack([tangent[:, 1], -tangent[:, 0]], axis=1)
    normals /= np.linalg.norm(normals, axis=1)[:, None]

    centroids = mesh.vertices[triangles].mean(axis=1)
    inward = np.sum(normals * (centroids - 0.5 * (start + end)), axis=1) > 0
    return np.where(inward[:, None], normals, -normals)


def assemble_load(mesh: Mesh, k: complex, d) -> np.ndarray:
    """
    Load vector ⟨g, φ_i⟩_Γ of the sound-hard scattering problem.

    g = ∂u_inc/∂ν is the normal derivative of the plane wave along the unit
    normal ν of Γ pointing out of the obstacle.
    """
    load = np.zeros(mesh.nb_vertices, dtype=complex)
    if k == 0:
        return load

    d = np.asarray(d, dtype=float)
    d = d / np.linalg.norm(d)

    edges = mesh.edges(GAMMA)
    normals = _gamma_normals(mesh, edges)
    start = mesh.vertices[edges[:, 0]]
    end = mesh.vertices[edges[:, 1]]
    lengths = np.linalg.norm(end - start, axis=1)

    q = max(4, int(math.ceil(2 + abs(k) * mesh.h)))
    t, w = gauss_legendre(q)
    points = start[:, None, :] + t[None, :, None] * (end - start)[:, None, :]
    g = 1j * k * (normals @ d)[:, None] * plane_wave(k, d, points)
    weighted = g * w[None, :] * lengths[:, None]

    np.add.at(load, edges[:, 0], weighted @ (1 - t))
    np.add.at(load, edges[:, 1], weighted @ t)
    return load


def coercive_matrix(S1: sp.spmatrix, S2: sp.spmatrix, fourier: BoundaryFourier) -> sp.csr_matrix:
    """ A_N = S1 + S2 + π Σ_{n>=1} n (c_n c_nᵀ + s_n s_nᵀ). """
    n = np.arange(fourier.N + 1)[:, None]
    C = fourier.cos * np.sqrt(np.pi * n)
    S = fourier.sin * np.sqrt(np.pi * n)
    block = C.T @ C + S.T @ S
    rows, cols = np.meshgrid(fourier.dofs, fourier.dofs, indexing="ij")
    shape = (fourier.ndof, fourier.ndof)
    boundary = sp.coo_matrix((block.ravel(), (rows.ravel(), cols.ravel())), shape=shape)
    return as_csr(S1 + S2 + boundary)
