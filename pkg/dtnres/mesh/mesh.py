# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.


from typing import Optional

import numpy as np
import networkx as nx

from dtnres.errors import MeshError


GAMMA = "GAMMA"
GAMMA_R = "GAMMA_R"
TAGS = (GAMMA, GAMMA_R)

#: Smallest admissible triangle area.
MIN_AREA = 1e-14


def _readonly(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


class Mesh:
    """
    Conforming P1 triangulation of the annulus between Γ and Γ_R.

    Attributes:
        vertices: Coordinates, shape (n, 2).
        triangles: Vertex indices, shape (m, 3), counter-clockwise.
        boundary_edges: Vertex index pairs, shape (e, 2).
        boundary_tags: Index in `TAGS` of each boundary edge, shape (e,).

    All arrays are read-only.
    """

    def __init__(self, vertices, triangles, boundary_edges, boundary_tags) -> None:
        self.vertices = _readonly(np.array(vertices, dtype=float).reshape(-1, 2))
        self.triangles = _readonly(np.array(triangles, dtype=np.int64).reshape(-1, 3))
        self.boundary_edges = _readonly(np.array(boundary_edges, dtype=np.int64).reshape(-1, 2))

        tags = [TAGS.index(tag) if isinstance(tag, str) else int(tag) for tag in boundary_tags]
        self.boundary_tags = _readonly(np.array(tags, dtype=np.int64))
        if len(self.boundary_tags) != len(self.boundary_edges):
            raise MeshError("Expecting one tag per boundary edge.", check="boundary")

        self._h = None

    @property
    def nb_vertices(self) -> int:
        return len(self.vertices)

    @property
    def nb_triangles(self) -> int:
        return len(self.triangles)

    @property
    def h(self) -> float:
        if self._h is None:
            self._h = mesh_size(self)

        return self._h

    def edges(self, tag: str) -> np.ndarray:
        """ Boundary edges carrying `tag` (GAMMA or GAMMA_R). """
        return self.boundary_edges[self.boundary_tags == TAGS.index(tag)]

    def boundary_nodes(self, tag: str) -> np.ndarray:
        """ Sorted indices of the vertices lying on the boundary `tag`. """
        return np.unique(self.edges(tag))

    def signed_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        e1, e2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def area(self) -> float:
        return float(np.sum(self.signed_areas()))

    def __eq__(self, other) -> bool:
        return (isinstance(other, Mesh)
                and np.array_equal(self.vertices, other.vertices)
                and np.array_equal(self.triangles, other.triangles)
                and np.array_equal(self.boundary_edges, other.boundary_edges)
                and np.array_equal(self.boundary_tags, other.boundary_tags))

    def __repr__(self) -> str:
        return "Mesh(nb_vertices={}, nb_triangles={}, nb_boundary_edges={})".format(
            self.nb_vertices, self.nb_triangles, len(self.boundary_edges))


def triangle_edges(triangles: np.ndarray) -> np.ndarray:
    """ The 3 edges of every triangle, each sorted, shape (3m, 2). """
    edges = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    return np.sort(edges, axis=1)


def mesh_size(mesh: Mesh) -> float:
    """ Longest edge of the triangulation. """
    edges = triangle_edges(mesh.triangles)
    lengths = np.linalg.norm(mesh.vertices[edges[:, 0]] - mesh.vertices[edges[:, 1]], axis=1)
    return float(lengths.max())


def check_mesh(mesh: Mesh, R: Optional[float] = None) -> None:
    """
    Check the mesh invariants.

    Raises:
        MeshError: naming the first failed check (orientation, conformity,
                   boundary, snapping or loop).
    """
    nb_vertices = mesh.nb_vertices
    if mesh.triangles.size and (mesh.triangles.min() < 0 or mesh.triangles.max() >= nb_vertices):
        raise MeshError("Triangle references an unknown vertex.", check="conformity")

    areas = mesh.signed_areas()
    bad = np.flatnonzero(areas <= MIN_AREA)
    if len(bad) > 0:
        msg = "Triangle {} is not positively oriented (area {:.3g})."
        raise MeshError(msg.format(bad[0], areas[bad[0]]), check="orientation", index=int(bad[0]))

    edges, counts = np.unique(triangle_edges(mesh.triangles), axis=0, return_counts=True)
    if np.any(counts > 2):
        index = int(np.argmax(counts > 2))
        msg = "Edge {} is shared by more than two triangles."
        raise MeshError(msg.format(tuple(edges[index])), check="conformity", index=index)

    outer = {tuple(edge) for edge in edges[counts == 1]}
    tagged = [tuple(edge) for edge in np.sort(mesh.boundary_edges, axis=1)]
    if len(set(tagged)) != len(tagged) or set(tagged) != outer:
        missing = sorted(outer - set(tagged))
        msg = "Tagged boundary edges do not match the boundary of the triangulation"
        if missing:
            msg += " (untagged edge {})".format(missing[0])

        raise MeshError(msg + ".", check="boundary")

    if R is not None:
        nodes = mesh.boundary_nodes(GAMMA_R)
        gaps = np.abs(np.linalg.norm(mesh.vertices[nodes], axis=1) - R)
        if len(gaps) and gaps.max() > 1e-12 * R:
            index = int(nodes[np.argmax(gaps)])
            msg = "Vertex {} of GAMMA_R is off the circle |x| = {} by {:.3g}."
            raise MeshError(msg.format(index, R, gaps.max()), check="snapping", index=index)

    for tag in TAGS:
        graph = nx.Graph()
        graph.add_edges_from(map(tuple, mesh.edges(tag)))
        if (graph.number_of_edges() < 3 or not nx.is_connected(graph)
                or any(degree != 2 for _, degree in graph.degree())):
            raise MeshError("Boundary {} is not a single closed loop.".format(tag), check="loop")
