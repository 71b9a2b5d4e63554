# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.


from typing import Iterable, Optional, Tuple

import numpy as np

from dtnres.errors import ShapeError


#: Number of rays used to validate the radial function.
NB_SAMPLING_RAYS = 4096


class ObstacleShape:
    """
    Star-shaped obstacle D whose boundary is Γ.

    Polygons are stored counter-clockwise. Γ is seen from `star_center` as
    the graph of a radial function θ ↦ r_Γ(θ).

    Attributes:
        kind: One of 'disk', 'square', 'lshape' or 'polygon'.
        radius: Radius of a disk (None for polygons).
        vertices: Corners of a polygon, shape (p, 2) (None for disks).
        star_center: Point c with respect to which D is star-shaped.
    """

    KINDS = ("disk", "square", "lshape", "polygon")

    def __init__(self, kind: str, radius: Optional[float] = None,
                 vertices: Optional[Iterable[Tuple[float, float]]] = None,
                 star_center: Tuple[float, float] = (0., 0.)) -> None:
        if kind not in self.KINDS:
            raise ShapeError("Unknown obstacle kind: {}".format(kind))

        self.kind = kind
        self.star_center = np.array(star_center, dtype=float)
        self.radius = None
        self.vertices = None

        if kind == "disk":
            if radius is None or radius <= 0:
                raise ShapeError("A disk needs a positive radius, got {}.".format(radius))

            if np.linalg.norm(self.star_center) != 0:
                raise ShapeError("Disks are centered at the origin.")

            self.radius = float(radius)
        else:
            vertices = np.array(vertices, dtype=float)
            if vertices.ndim != 2 or vertices.shape[1] != 2 or len(vertices) < 3:
                raise ShapeError("A polygon needs at least 3 vertices given as (x, y) pairs.")

            if _signed_area(vertices) < 0:
                vertices = vertices[::-1]

            self.vertices = vertices

        self._validate()

    @property
    def is_polygon(self) -> bool:
        return self.vertices is not None

    def _validate(self) -> None:
        if self.is_polygon:
            # Strictly inside every edge's half plane is the kernel condition.
            starts = self.vertices
            ends = np.roll(self.vertices, -1, axis=0)
            lengths = np.linalg.norm(ends - starts, axis=1)
            if np.any(lengths == 0):
                raise ShapeError("Polygon has repeated vertices.")

            sides = _cross(ends - starts, self.star_center - starts) / lengths
            if np.any(sides <= 1e-12):
                edge = int(np.argmin(sides))
                msg = "Obstacle is not star-shaped with respect to {} (edge {})."
                raise ShapeError(msg.format(tuple(self.star_center), edge))

        thetas = np.linspace(0, 2 * np.pi, NB_SAMPLING_RAYS, endpoint=False)
        radii = self.radial_function(thetas)
        if not np.all(np.isfinite(radii)) or np.any(radii <= 0):
            msg = "Radial function of the obstacle is not positive around {}."
            raise ShapeError(msg.format(tuple(self.star_center)))

    def radial_function(self, theta) -> np.ndarray:
        """ Distance from `star_center` to Γ along the ray of angle `theta`. """
        theta = np.asarray(theta, dtype=float)
        if not self.is_polygon:
            return np.full(theta.shape, self.radius)

        directions = np.stack([np.cos(theta), np.sin(theta)], axis=-1)[..., None, :]
        starts = self.vertices
        edges = np.roll(self.vertices, -1, axis=0) - starts
        offsets = starts - self.star_center

        with np.errstate(divide="ignore", invalid="ignore"):
            denominator = _cross(directions, edges)
            t = _cross(offsets, edges) / denominator
            s = _cross(offsets, directions) / denominator

        hits = (np.abs(denominator) > 1e-14) & (s >= -1e-12) & (s <= 1 + 1e-12) & (t > 0)
        t = np.where(hits, t, np.inf)
        return t.min(axis=-1)

    def boundary_point(self, theta) -> np.ndarray:
        """ Point of Γ on the ray of angle `theta` issued from `star_center`. """
        theta = np.asarray(theta, dtype=float)
        radii = self.radial_function(theta)
        directions = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        return self.star_center + radii[..., None] * directions

    def project(self, points) -> np.ndarray:
        """ Project points on Γ along rays issued from `star_center`. """
        offsets = np.asarray(points, dtype=float) - self.star_center
        return self.boundary_point(np.arctan2(offsets[..., 1], offsets[..., 0]))

    def corner_angles(self) -> np.ndarray:
        """ Angles of the polygon corners seen from `star_center`, in [0, 2π). """
        if not self.is_polygon:
            return np.empty(0)

        offsets = self.vertices - self.star_center
        return np.mod(np.arctan2(offsets[:, 1], offsets[:, 0]), 2 * np.pi)

    def area(self) -> float:
        if not self.is_polygon:
            return np.pi * self.radius ** 2

        return _signed_area(self.vertices)

    def circumradius(self) -> float:
        return circumradius(self)

    def __repr__(self) -> str:
        if self.is_polygon:
            return "ObstacleShape({!r}, vertices={})".format(self.kind, self.vertices.tolist())

        return "ObstacleShape({!r}, radius={})".format(self.kind, self.radius)


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _signed_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def circumradius(shape: ObstacleShape) -> float:
    """ Largest distance from the origin to a point of Γ. """
    if not shape.is_polygon:
        return shape.radius

    return float(np.max(np.linalg.norm(shape.vertices, axis=1)))


def disk(radius: float = 1.) -> ObstacleShape:
    return ObstacleShape("disk", radius=radius)


def square(side: float = 1.) -> ObstacleShape:
    a = side / 2
    return ObstacleShape("square", vertices=[(-a, -a), (a, -a), (a, a), (-a, a)])


def lshape() -> ObstacleShape:
    """ (-1/2, 1/2)² minus [0, 1/2]², star-shaped around (-1/4, -1/4). """
    vertices = [(-0.5, -0.5), (0.5, -0.5), (0.5, 0.), (0., 0.), (0., 0.5), (-0.5, 0.5)]
    return ObstacleShape("lshape", vertices=vertices, star_center=(-0.25, -0.25))


def polygon(vertices: Iterable[Tuple[float, float]],
            star_center: Tuple[float, float] = (0., 0.)) -> ObstacleShape:
    return ObstacleShape("polygon", vertices=vertices, star_center=star_center)


def make_shape(name: str) -> ObstacleShape:
    """ Build one of the named obstacles: 'disk', 'square' or 'lshape'. """
    factories = {"disk": disk, "square": square, "lshape": lshape}
    if name not in factories:
        raise ShapeError("Unknown obstacle: {}. Expecting one of {}.".format(name, sorted(factories)))

    return factories[name]()
