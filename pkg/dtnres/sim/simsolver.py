# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.


"""
Spectral indicator method.

The indicator of a square cell samples the spectral projection of B onto
the disk circumscribing the cell,

    x = 1/(2πi) ∮ B(z)^{-1} f dz,

which vanishes (up to quadrature error) when no eigenvalue lies inside.
Cells with a large indicator are subdivided until they are small enough to
seed the nonlinear inverse iteration.
"""

import logging
import math
import warnings
from typing import List, Optional, Sequence, Tuple

import numpy as np
import networkx as nx

from dtnres.errors import DtnresError, SearchWarning, SingularMatrixError, PoleError, RefinementError
from dtnres.linalg import random_vector
from dtnres.nep import ResonanceOperator, refine_eigenpair


logger = logging.getLogger("dtnres.sim")

Region = Tuple[float, float, float, float]


class Cell:
    """
    Square cell of the complex plane.

    Attributes:
        center: Complex center.
        half_width: Half of the side length.
        depth: Number of subdivisions from the root cell.
        flagged: Whether the search stopped at the maximal depth
                 without isolating the cell.
    """

    __slots__ = ["center", "half_width", "depth", "flagged"]

    def __init__(self, center: complex, half_width: float, depth: int = 0, flagged: bool = False) -> None:
        self.center = complex(center)
        self.half_width = float(half_width)
        self.depth = depth
        self.flagged = flagged

    def contour_radius(self, inflate: float = 1.25) -> float:
        return inflate * math.sqrt(2) * self.half_width

    def children(self) -> List["Cell"]:
        hw = self.half_width / 2
        offsets = [-hw + hw * 1j, hw + hw * 1j, -hw - hw * 1j, hw - hw * 1j]
        return [Cell(self.center + offset, hw, self.depth + 1) for offset in offsets]

    def contains(self, z: complex, inflate: float = 1.) -> bool:
        extent = inflate * self.half_width
        return abs(z.real - self.center.real) <= extent and abs(z.imag - self.center.imag) <= extent

    def bounds(self) -> Region:
        c, hw = self.center, self.half_width
        return (c.real - hw, c.real + hw, c.imag - hw, c.imag + hw)

    def farthest_distance_to_origin(self) -> float:
        return abs(self.center) + math.sqrt(2) * self.half_width

    def intersects(self, region: Region) -> bool:
        re_min, re_max, im_min, im_max = self.bounds()
        return re_min <= region[1] and re_max >= region[0] and im_min <= region[3] and im_max >= region[2]

    def to_dict(self):
        return {"center_re": self.center.real, "center_im": self.center.imag,
                "half_width": self.half_width, "depth": self.depth, "flagged": self.flagged}

    def __eq__(self, other) -> bool:
        return (isinstance(other, Cell) and self.center == other.center
                and self.half_width == other.half_width and self.depth == other.depth)

    def __repr__(self) -> str:
        return "Cell(center={}, half_width={}, depth={}{})".format(
            self.center, self.half_width, self.depth, ", flagged" if self.flagged else "")


class SimConfig:
    """
    Parameters of the spectral indicator search.

    Attributes:
        n_quad (int): Trapezoid nodes on each contour (at least 8).
        contour_inflate (float): Contour radius over the cell's circumradius (> 1).
        threshold (float): Indicator above which a cell is subdivided.
        threshold_deep (float): Threshold used from depth `deep_depth` on.
        deep_depth (int): Depth where `threshold_deep` takes over.
        min_cell (float): Cells with half width below it are candidates.
        vector_seed (int): Seed of the random right-hand side.
        max_depth (int): Deepest subdivision.
        dedupe_radius (float): Poles closer than this are the same pole.
        dedupe_scale (float): On a mesh of size h, poles closer than
            dedupe_scale·(h|λ|)² are also the same pole (0 disables it).
        residual_tol (float): Largest accepted relative residual.
        root_half_width (float): Largest half width of the root cells.
        origin_margin (float): Cells entirely within this distance of 0 are dropped.
        refine_tol (float): Relative tolerance of the inverse iteration.
        refine_max_iter (int): Steps of the inverse iteration.
        workers (int): Number of worker processes (1 runs in process).
    """

    def __init__(self, **kwargs) -> None:
        self.n_quad = 16
        self.contour_inflate = 1.25
        self.threshold = 1e-2
        self.threshold_deep = 1e-4
        self.deep_depth = 8
        self.min_cell = 5e-4
        self.vector_seed = 0
        self.max_depth = 16
        self.dedupe_radius = 1e-6
        self.dedupe_scale = 1e-2
        self.residual_tol = 1e-8
        self.root_half_width = 0.5
        self.origin_margin = 0.05
        self.refine_tol = 1e-12
        self.refine_max_iter = 30
        self.workers = 1
        for key, value in kwargs.items():
            if not hasattr(self, key):
                raise ValueError("Unknown SIM parameter: {}".format(key))

            setattr(self, key, value)

    def check(self) -> None:
        if self.n_quad < 8:
            raise ValueError("n_quad must be at least 8, got {}.".format(self.n_quad))

        if self.contour_inflate <= 1:
            raise ValueError("contour_inflate must be > 1, got {}.".format(self.contour_inflate))

        positive = ["threshold", "threshold_deep", "min_cell", "dedupe_radius", "residual_tol",
                    "root_half_width", "origin_margin", "refine_tol"]
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError("{} must be positive, got {}.".format(name, getattr(self, name)))

        if self.dedupe_scale < 0:
            raise ValueError("dedupe_scale must be >= 0, got {}.".format(self.dedupe_scale))

        if self.max_depth < 1 or self.refine_max_iter < 1 or self.workers < 1:
            raise ValueError("max_depth, refine_max_iter and workers must be >= 1.")

    def copy(self) -> "SimConfig":
        return SimConfig(**vars(self))

    def __eq__(self, other) -> bool:
        return isinstance(other, SimConfig) and vars(self) == vars(other)


class ValidatedPole:
    """
    Resonance that passed validation.

    Attributes:
        eigenvalue: Complex wavenumber λ.
        residual: Relative residual of the eigenpair.
        cell: Candidate cell the refinement started from.
        group_size: Number of refined candidates merged into this pole.
        vector: Eigenvector (‖·‖₂ = 1).
    """

    def __init__(self, eigenvalue: complex, residual: float, cell: Cell,
                 group_size: int = 1, vector: Optional[np.ndarray] = None) -> None:
        self.eigenvalue = complex(eigenvalue)
        self.residual = residual
        self.cell = cell
        self.group_size = group_size
        self.vector = vector

    def __repr__(self) -> str:
        return "ValidatedPole({:.10g}, residual={:.2g}, group_size={})".format(
            self.eigenvalue, self.residual, self.group_size)


class Rejection:
    """ Candidate dropped during validation, with the reason why. """

    def __init__(self, cell: Cell, reason: str, eigenvalue: Optional[complex] = None,
                 residual: Optional[float] = None, message: str = "") -> None:
        self.cell = cell
        self.reason = reason
        self.eigenvalue = eigenvalue
        self.residual = residual
        self.message = message

    def to_dict(self):
        data = {"reason": self.reason, "cell": self.cell.to_dict(), "message": self.message}
        if self.eigenvalue is not None:
            data["re_k"] = self.eigenvalue.real
            data["im_k"] = self.eigenvalue.imag

        if self.residual is not None:
            data["residual"] = self.residual

        return data

    def __repr__(self) -> str:
        return "Rejection({}, {})".format(self.reason, self.cell)


class PoleList(list):
    """ List of :py:class:`ValidatedPole` that also keeps the rejected candidates. """

    def __init__(self, poles: Sequence[ValidatedPole] = (), rejections: Sequence[Rejection] = ()) -> None:
        super().__init__(poles)
        self.rejections = list(rejections)


def contour_nodes(cell: Cell, config: SimConfig) -> np.ndarray:
    q = np.arange(config.n_quad)
    radius = cell.contour_radius(config.contour_inflate)
    return cell.center + radius * np.exp(2j * np.pi * q / config.n_quad)


def indicator(op: ResonanceOperator, cell: Cell, config: SimConfig, f: Optional[np.ndarray] = None) -> float:
    """
    Spectral indicator δ = ‖x‖ / ‖f‖ of a cell.

    The contour integral is approximated by the trapezoid rule,
    x = 1/n Σ_q (z_q - c) B(z_q)^{-1} f. A contour node where B is singular
    (or where the DtN map has a pole) yields δ = +∞, and so does a node the
    special functions cannot evaluate: the cell is then localized and its
    refinement reports the error.
    """
    if f is None:
        f = random_vector(op.ndof, config.vector_seed)

    x = np.zeros(op.ndof, dtype=complex)
    for z in contour_nodes(cell, config):
        try:
            x += (z - cell.center) * op.solve_linear(z, f)
        except (SingularMatrixError, PoleError):
            logger.debug("Contour node %s of %s is a near eigenvalue.", z, cell)
            return np.inf
        except DtnresError as e:
            logger.warning("Contour node %s of %s cannot be evaluated: %s", z, cell, e)
            return np.inf

    return float(np.linalg.norm(x / config.n_quad) / np.linalg.norm(f))


def root_cells(region: Region, config: SimConfig) -> List[Cell]:
    """ Squares of half width <= root_half_width covering `region` (possibly overhanging it). """
    re_min, re_max, im_min, im_max = region
    width, height = re_max - re_min, im_max - im_min
    n_re = max(1, int(math.ceil(width / (2 * config.root_half_width) - 1e-12)))
    n_im = max(1, int(math.ceil(height / (2 * config.root_half_width) - 1e-12)))
    hw = max(width / (2 * n_re), height / (2 * n_im))
    cells = []
    for j in range(int(math.ceil(height / (2 * hw) - 1e-12))):
        for i in range(int(math.ceil(width / (2 * hw) - 1e-12))):
            center = complex(re_min + (2 * i + 1) * hw, im_max - (2 * j + 1) * hw)
            cells.append(Cell(center, hw))

    return cells


def _touches_origin(cell: Cell, config: SimConfig) -> bool:
    # In the closed fourth quadrant a contour disk reaching ℝ⁻ also contains 0.
    return abs(cell.center) <= cell.contour_radius(config.contour_inflate)


def search(op: ResonanceOperator, region: Region, config: SimConfig, batch=None) -> List[Cell]:
    """
    Breadth-first quadtree search for cells containing eigenvalues.

    Returns:
        Candidate cells sorted by the (real, imaginary) parts of their centers.
    """
    from dtnres.sim.batch import make_batch

    config.check()
    owns_batch = batch is None
    batch = batch or make_batch(op, config)
    candidates = []
    try:
        level = root_cells(region, config)
        depth = 0
        while level:
            to_evaluate = []
            next_level = []
            for cell in level:
                if cell.farthest_distance_to_origin() <= config.origin_margin:
                    continue

                if _touches_origin(cell, config):
                    next_level += [child for child in cell.children() if child.intersects(region)]
                else:
                    to_evaluate.append(cell)

            deltas = batch.indicators(to_evaluate, config.vector_seed)
            confirm = []
            for cell, delta in zip(to_evaluate, deltas):
                threshold = config.threshold_deep if cell.depth >= config.deep_depth else config.threshold
                if delta <= threshold:
                    continue

                if cell.half_width <= config.min_cell:
                    candidates.append(cell)
                elif cell.depth >= config.max_depth:
                    confirm.append(cell)
                else:
                    next_level += [child for child in cell.children() if child.intersects(region)]

            if confirm:
                deltas = batch.indicators(confirm, config.vector_seed + 1)
                for cell, delta in zip(confirm, deltas):
                    if delta > config.threshold_deep:
                        cell.flagged = True
                        candidates.append(cell)
                        msg = "Cell {} still has indicator {:.3g} at depth {}.".format(cell, delta, cell.depth)
                        logger.warning(msg)
                        warnings.warn(msg, SearchWarning)

            logger.info("Depth %d: %d cells evaluated, %d kept, %d candidates so far.",
                        depth, len(to_evaluate), len(next_level), len(candidates))
            level = next_level
            depth += 1
    finally:
        if owns_batch:
            batch.close()

    candidates.sort(key=lambda cell: (cell.center.real, cell.center.imag))
    return candidates


def _in_region(z: complex, region: Region) -> bool:
    re_min, re_max, im_min, im_max = region
    return re_min <= z.real <= re_max and im_min <= z.imag <= im_max


def merge_radius(radius: float, scale: float, h: float, k: complex) -> float:
    """
    Distance below which two refined poles near `k` are the same resonance.

    The floor is `radius`; on a mesh of size h it grows to scale·(h|k|)²,
    the size of the splitting a mesh without the obstacle's symmetry
    imposes on a double pole.
    """
    return max(radius, scale * (h * abs(k)) ** 2)


def group_poles(poles: Sequence[ValidatedPole], radius: float, h: float = 0., scale: float = 0.) -> List[ValidatedPole]:
    """
    Merge poles closer than max(radius, scale·(h|λ|)²), keeping the smallest residual of each group.

    |λ| is the larger modulus of the pair; the default h = 0 merges within
    `radius` only.
    """
    graph = nx.Graph()
    graph.add_nodes_from(range(len(poles)))
    for i in range(len(poles)):
        for j in range(i + 1, len(poles)):
            a, b = poles[i].eigenvalue, poles[j].eigenvalue
            if abs(a - b) <= merge_radius(radius, scale, h, max(abs(a), abs(b))):
                graph.add_edge(i, j)

    merged = []
    for component in nx.connected_components(graph):
        members = sorted(component)
        best = min(members, key=lambda i: (poles[i].residual, i))
        pole = poles[best]
        group_size = sum(poles[i].group_size for i in members)
        merged.append(ValidatedPole(pole.eigenvalue, pole.residual, pole.cell, group_size, pole.vector))

    return merged


def find_resonances(op: ResonanceOperator, region: Region, config: Optional[SimConfig] = None) -> PoleList:
    """
    Resonances of `op` inside `region` = (re_min, re_max, im_min, im_max).

    Candidate cells from :py:func:`search` are refined by inverse iteration
    and validated: the refined λ must have a small residual, stay close to
    its cell and lie inside the region. Survivors closer than
    :py:func:`merge_radius` are merged; a candidate whose refinement
    raised is kept as a rejection with the error's name.

    Returns:
        Validated poles sorted by modulus, with the rejected candidates in
        the `rejections` attribute.
    """
    from dtnres.sim.batch import make_batch

    config = config or SimConfig()
    config.check()
    with make_batch(op, config) as batch:
        cells = search(op, region, config, batch=batch)
        logger.info("Refining %d candidate cells.", len(cells))
        outcomes = batch.refine([cell.center for cell in cells])

    poles, rejections = [], []
    for cell, outcome in zip(cells, outcomes):
        if isinstance(outcome, DtnresError):
            reason = "refinement" if isinstance(outcome, RefinementError) else "evaluation"
            message = "{}: {}".format(type(outcome).__name__, outcome)
            rejections.append(Rejection(cell, reason, message=message))
            continue

        if outcome.residual > config.residual_tol:
            reason = "residual"
        elif not cell.contains(outcome.eigenvalue, inflate=10):
            reason = "escaped"
        elif not _in_region(outcome.eigenvalue, region):
            reason = "region"
        else:
            poles.append(ValidatedPole(outcome.eigenvalue, outcome.residual, cell, 1, outcome.vector))
            continue

        logger.debug("Rejecting %s from %s (%s).", outcome, cell, reason)
        rejections.append(Rejection(cell, reason, outcome.eigenvalue, outcome.residual))

    h = op.mesh.h if op.mesh is not None else 0.
    poles = group_poles(poles, config.dedupe_radius, h, config.dedupe_scale)
    poles.sort(key=lambda pole: (abs(pole.eigenvalue), pole.eigenvalue.real))
    logger.info("%d poles validated, %d candidates rejected.", len(poles), len(rejections))
    return PoleList(poles, rejections)


def refine_candidate(op: ResonanceOperator, center: complex, config: SimConfig):
    """ Refined eigenpair, or the DtnresError describing why it failed. """
    try:
        return refine_eigenpair(op, center, tol=config.refine_tol, max_iter=config.refine_max_iter,
                                seed=config.vector_seed)
    except DtnresError as e:
        return e
