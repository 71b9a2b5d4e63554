# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.


"""
Structured annulus meshes and their uniform refinement.

A template mesh is built from rays issued from the star center of the
obstacle: every ray is cut into `n_layers` segments between Γ and the
circle Γ_R, and the resulting quads are split into two triangles.
"""

import logging
import math
from typing import Tuple

import numpy as np

from dtnres.errors import MeshError, ShapeError
from dtnres.mesh.mesh import Mesh, GAMMA, GAMMA_R, TAGS, triangle_edges
from dtnres.mesh.shapes import ObstacleShape, circumradius


logger = logging.getLogger("dtnres.mesh")

#: Mesh size of refinement level 1.
DEFAULT_H1 = math.pi / 25


def angular_grid(shape: ObstacleShape, n_theta: int) -> np.ndarray:
    """ Uniform angles about the star center, snapped to the corners of Γ. """
    step = 2 * math.pi / n_theta
    thetas = list(np.arange(n_theta) * step)
    snapped = set()
    extra = []
    for corner in shape.corner_angles():
        index = int(round(corner / step)) % n_theta
        if index in snapped:
            extra.append(corner)
        else:
            thetas[index] = corner
            snapped.add(index)

    thetas = np.sort(np.mod(np.array(thetas + extra), 2 * math.pi))
    gaps = np.diff(np.append(thetas, thetas[0] + 2 * math.pi))
    if np.any(gaps <= 1e-12):
        raise ShapeError("Angular grid with {} rays cannot resolve the corners of {}.".format(n_theta, shape))

    return thetas


def _circle_distance(shape: ObstacleShape, R: float, thetas: np.ndarray) -> np.ndarray:
    # Solve |c + rho e| = R for rho > 0.
    c = shape.star_center
    ce = c[0] * np.cos(thetas) + c[1] * np.sin(thetas)
    return -ce + np.sqrt(ce ** 2 - c.dot(c) + R ** 2)


def generate_template_mesh(shape: ObstacleShape, R: float, n_theta: int, n_layers: int) -> Mesh:
    """
    Generate the structured mesh of the annulus between Γ and Γ_R.

    Args:
        shape: Obstacle whose boundary is Γ.
        R: Radius of the artificial boundary Γ_R.
        n_theta: Number of uniformly spaced rays (at least 8).
        n_layers: Number of layers between Γ and Γ_R (at least 2).

    Raises:
        ShapeError: if R does not enclose the obstacle.
    """
    if n_theta < 8 or n_layers < 2:
        raise ValueError("Expecting n_theta >= 8 and n_layers >= 2, got {} and {}.".format(n_theta, n_layers))

    if R <= circumradius(shape) or np.linalg.norm(shape.star_center) >= R:
        raise ShapeError("R = {} does not enclose the obstacle (circumradius {}).".format(R, circumradius(shape)))

    thetas = angular_grid(shape, n_theta)
    n = len(thetas)
    inner = shape.boundary_point(thetas)
    rays = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
    outer = shape.star_center + _circle_distance(shape, R, thetas)[:, None] * rays
    outer = R * outer / np.linalg.norm(outer, axis=1)[:, None]

    t = np.arange(n_layers + 1) / n_layers
    vertices = (1 - t)[:, None, None] * inner + t[:, None, None] * outer
    vertices = vertices.reshape(-1, 2)

    j, i = np.meshgrid(np.arange(n_layers), np.arange(n), indexing="ij")
    j, i = j.ravel(), i.ravel()
    i1 = (i + 1) % n
    a, b = j * n + i, j * n + i1
    c, d = (j + 1) * n + i1, (j + 1) * n + i

    diagonal_ac = np.linalg.norm(vertices[a] - vertices[c], axis=1)
    diagonal_bd = np.linalg.norm(vertices[b] - vertices[d], axis=1)
    # A diagonal is usable when both halves have the quad's orientation.
    usable_ac = _area(vertices, a, b, c) * _area(vertices, a, c, d) > 0
    usable_bd = _area(vertices, a, b, d) * _area(vertices, b, c, d) > 0
    split_ac = np.where(usable_ac & usable_bd, diagonal_ac <= diagonal_bd, usable_ac)[:, None]
    first = np.where(split_ac, np.stack([a, b, c], axis=1), np.stack([a, b, d], axis=1))
    second = np.where(split_ac, np.stack([a, c, d], axis=1), np.stack([b, c, d], axis=1))
    triangles = np.concatenate([first, second])
    triangles = _orient(vertices, triangles)

    ring = np.arange(n)
    edges_gamma = np.stack([ring, (ring + 1) % n], axis=1)
    edges_gamma_r = edges_gamma + n_layers * n
    boundary_edges = np.concatenate([edges_gamma, edges_gamma_r])
    boundary_tags = [GAMMA] * n + [GAMMA_R] * n

    return Mesh(vertices, triangles, boundary_edges, boundary_tags)


def _area(vertices: np.ndarray, i, j, k) -> np.ndarray:
    e1, e2 = vertices[j] - vertices[i], vertices[k] - vertices[i]
    return e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]


def _orient(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    negative = _area(vertices, triangles[:, 0], triangles[:, 1], triangles[:, 2]) < 0
    triangles = triangles.copy()
    triangles[negative] = triangles[negative][:, [0, 2, 1]]
    return triangles


def refine_uniform(mesh: Mesh, shape: ObstacleShape, R: float) -> Mesh:
    """
    Split every triangle into four (red refinement).

    Midpoints of GAMMA_R edges are pushed radially onto |x| = R and midpoints
    of GAMMA edges are projected on Γ along the ray from the star center.

    Raises:
        MeshError: if the boundary tags are inconsistent with the triangulation.
    """
    vertices = mesh.vertices
    triangles = mesh.triangles
    nb_triangles = len(triangles)

    all_edges = triangle_edges(triangles)
    edges, inverse = np.unique(all_edges, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    midpoints = 0.5 * (vertices[edges[:, 0]] + vertices[edges[:, 1]])

    keys = edges[:, 0] * len(vertices) + edges[:, 1]
    boundary = np.sort(mesh.boundary_edges, axis=1)
    boundary_keys = boundary[:, 0] * len(vertices) + boundary[:, 1]
    positions = np.searchsorted(keys, boundary_keys)
    positions = np.minimum(positions, len(keys) - 1)
    if np.any(keys[positions] != boundary_keys):
        bad = int(np.flatnonzero(keys[positions] != boundary_keys)[0])
        raise MeshError("Boundary edge {} is not an edge of the triangulation.".format(bad), check="boundary", index=bad)

    on_circle = positions[mesh.boundary_tags == TAGS.index(GAMMA_R)]
    on_gamma = positions[mesh.boundary_tags == TAGS.index(GAMMA)]
    if len(np.intersect1d(on_circle, on_gamma)):
        raise MeshError("An edge carries both GAMMA and GAMMA_R tags.", check="boundary")

    circle_nodes = mesh.boundary_nodes(GAMMA_R)
    if np.any(np.abs(np.linalg.norm(vertices[circle_nodes], axis=1) - R) > 1e-10 * R):
        raise MeshError("GAMMA_R vertices do not lie on |x| = {}.".format(R), check="snapping")

    norms = np.linalg.norm(midpoints[on_circle], axis=1)
    midpoints[on_circle] *= (R / norms)[:, None]
    midpoints[on_gamma] = shape.project(midpoints[on_gamma])

    offset = len(vertices)
    m01, m12, m20 = (offset + inverse[k * nb_triangles:(k + 1) * nb_triangles] for k in range(3))
    v0, v1, v2 = triangles.T
    children = np.concatenate([
        np.stack([v0, m01, m20], axis=1),
        np.stack([m01, v1, m12], axis=1),
        np.stack([m20, m12, v2], axis=1),
        np.stack([m01, m12, m20], axis=1),
    ])

    middle = offset + positions
    boundary_edges = np.concatenate([
        np.stack([mesh.boundary_edges[:, 0], middle], axis=1),
        np.stack([middle, mesh.boundary_edges[:, 1]], axis=1),
    ])
    boundary_tags = np.concatenate([mesh.boundary_tags, mesh.boundary_tags])

    return Mesh(np.concatenate([vertices, midpoints]), children, boundary_edges, boundary_tags)


def template_resolution(shape: ObstacleShape, R: float, h_target: float = DEFAULT_H1) -> Tuple[int, int]:
    """
    Pick (n_theta, n_layers) so that the template mesh size is close to `h_target`.

    The chosen template has a mesh size within 10% of `h_target` whenever
    such a template exists; among the candidates the closest one wins.
    """
    thickness = R - float(np.min(shape.radial_function(np.linspace(0, 2 * np.pi, 256, endpoint=False))))
    guess_layers = max(2, int(math.ceil(thickness / h_target)))
    guess_theta = max(8, int(math.ceil(2 * math.pi * R / h_target)))

    best = None
    for n_layers in range(max(2, guess_layers - 1), 2 * guess_layers + 3):
        lo, hi = 8, 4 * guess_theta
        # Mesh size decreases with the number of rays; find the first n_theta below target.
        while lo < hi:
            mid = (lo + hi) // 2
            if generate_template_mesh(shape, R, mid, n_layers).h <= h_target:
                hi = mid
            else:
                lo = mid + 1

        for n_theta in (lo - 1, lo):
            if n_theta < 8:
                continue

            h = generate_template_mesh(shape, R, n_theta, n_layers).h
            error = abs(h - h_target) / h_target
            if best is None or error < best[0] - 1e-12:
                best = (error, n_theta, n_layers)

    error, n_theta, n_layers = best
    if error > 0.1:
        logger.warning("Template mesh size is %.1f%% away from %g.", 100 * error, h_target)

    logger.debug("Template resolution for h=%g: n_theta=%d, n_layers=%d", h_target, n_theta, n_layers)
    return n_theta, n_layers


def build_mesh(shape: ObstacleShape, R: float, level: int, h1: float = DEFAULT_H1) -> Mesh:
    """ Mesh of refinement `level` (>= 1); level 1 has mesh size close to `h1`. """
    if level < 1:
        raise ValueError("Refinement level must be >= 1, got {}.".format(level))

    n_theta, n_layers = template_resolution(shape, R, h1)
    mesh = generate_template_mesh(shape, R, n_theta, n_layers)
    for _ in range(level - 1):
        mesh = refine_uniform(mesh, shape, R)

    logger.info("Mesh of level %d: %d vertices, %d triangles, h=%.4g",
                level, mesh.nb_vertices, mesh.nb_triangles, mesh.h)
    return mesh
