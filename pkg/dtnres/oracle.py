# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.


"""
Analytic references for the sound-hard unit disk.

The resonances of the unit disk are the zeros of H_m^{(1)'} for m >= 0 and
the scattered field of a plane wave is given by its Mie series.
"""

import logging
from typing import List, Sequence, Tuple

import numpy as np
import networkx as nx
from scipy import special

from dtnres.errors import ConvergenceError
from dtnres.specfun import hankel1_array, hankel1_prime_array


logger = logging.getLogger("dtnres.oracle")

#: Grid step of the scan for zeros of H_m'.
SCAN_STEP = 0.05
#: Highest order of the Mie series.
MAX_MIE_ORDER = 200


class DiskPole:
    """
    Resonance of the unit disk.

    Attributes:
        m: Angular order (the pole is double for m >= 1).
        k: Complex wavenumber, a zero of H_m^{(1)'}.
        newton_residual: |H_m^{(1)'}(k)| at the returned k.
    """

    def __init__(self, m: int, k: complex, newton_residual: float) -> None:
        self.m = m
        self.k = complex(k)
        self.newton_residual = newton_residual

    def __repr__(self) -> str:
        return "DiskPole(m={}, k={:.10g}, newton_residual={:.2g})".format(self.m, self.k, self.newton_residual)


def _in_region(k: complex, region: Sequence[float], slack: float = 0.) -> bool:
    re_min, re_max, im_min, im_max = region
    return (re_min - slack <= k.real <= re_max + slack) and (im_min - slack <= k.imag <= im_max + slack)


def _newton(m: int, z: complex, max_iter: int = 50, tol: float = 1e-14):
    for _ in range(max_iter):
        H = complex(hankel1_array(m, z))
        dH = complex(hankel1_prime_array(m, z))
        ddH = -dH / z - (1 - m ** 2 / z ** 2) * H
        if not np.isfinite(ddH) or ddH == 0:
            return None

        step = dH / ddH
        z -= step
        if abs(step) <= tol * abs(z):
            return z

    return None


def _scan_minima(m: int, region: Sequence[float], step: float) -> List[complex]:
    re_min, re_max, im_min, im_max = region
    pad = 2 * step
    xs = np.arange(max(re_min - pad, step / 2), re_max + pad + step / 2, step)
    ys = np.arange(im_min - pad, min(im_max + pad, -step / 2) + step / 2, step)
    Z = xs[None, :] + 1j * ys[:, None]
    with np.errstate(all="ignore"):
        values = np.abs(hankel1_prime_array(m, Z))

    values = np.where(np.isfinite(values), values, np.inf)
    inner = values[1:-1, 1:-1]
    is_minimum = np.ones(inner.shape, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == dj == 0:
                continue

            neighbour = values[1 + di:values.shape[0] - 1 + di, 1 + dj:values.shape[1] - 1 + dj]
            is_minimum &= inner < neighbour

    return list(Z[1:-1, 1:-1][is_minimum])


def disk_exact_poles(region: Sequence[float], m_max: int = 12, step: float = SCAN_STEP) -> List[DiskPole]:
    """
    Zeros of H_m^{(1)'} (0 <= m <= m_max) inside `region`.

    Args:
        region: (re_min, re_max, im_min, im_max) in the lower half plane.
        m_max: Highest angular order.
        step: Grid step of the initial scan.

    Returns:
        Poles sorted by modulus.
    """
    poles = []
    for m in range(m_max + 1):
        found = []
        for seed in _scan_minima(m, region, step):
            k = _newton(m, seed)
            if k is None:
                logger.debug("Newton from %s did not converge for m=%d.", seed, m)
                continue

            if any(abs(k - other) <= 1e-8 * max(1., abs(k)) for other in found):
                continue

            found.append(k)
            if _in_region(k, region):
                residual = float(abs(hankel1_prime_array(m, k)))
                poles.append(DiskPole(m, k, residual))

    poles.sort(key=lambda pole: (abs(pole.k), pole.m))
    logger.info("Found %d disk poles in %s for m <= %d.", len(poles), tuple(region), m_max)
    return poles


def mie_scattered_field(k: float, d, points: np.ndarray, radius: float = 1.) -> np.ndarray:
    """
    Field scattered by the sound-hard disk for the incident wave exp(i k d·x).

        u = Σ_m α_m H_m(k r) e^{imθ},  α_m = -β_m J_m'(k) / H_m'(k),  β_m = i^m e^{-imφ}

    where φ is the angle of d. Terms ±m are summed together.

    Raises:
        ConvergenceError: if the series has not converged after 200 orders.
    """
    if not np.isreal(k) or np.real(k) <= 0:
        raise ValueError("The Mie series needs a real wavenumber k > 0, got {}.".format(k))

    k = float(np.real(k))
    d = np.asarray(d, dtype=float)
    phi = np.arctan2(d[1], d[0])
    points = np.asarray(points, dtype=float)
    r = np.linalg.norm(points, axis=-1)
    theta = np.arctan2(points[..., 1], points[..., 0])
    if np.any(r < radius * (1 - 1e-12)):
        raise ValueError("The Mie series is evaluated outside the disk only.")

    total = np.zeros(r.shape, dtype=complex)
    small = []
    for m in range(MAX_MIE_ORDER + 1):
        ratio = special.jvp(m, k * radius) / special.h1vp(m, k * radius)
        weight = 1. if m == 0 else 2.
        term = -weight * (1j ** m) * ratio * special.hankel1(m, k * r) * np.cos(m * (theta - phi))
        total += term

        small.append(np.max(np.abs(term)) < 1e-13 * max(np.max(np.abs(total)), 1e-300))
        if m >= 2 and all(small[-3:]):
            logger.debug("Mie series converged after %d orders.", m + 1)
            return total

    raise ConvergenceError("Mie series did not converge within {} orders.".format(MAX_MIE_ORDER))


def match_poles(computed: Sequence[complex], reference: Sequence[complex],
                radius: float) -> List[Tuple[int, int, float]]:
    """
    One-to-one matching of computed and reference poles closer than `radius`.

    The matching has maximal cardinality and, among those, minimal total
    distance.

    Returns:
        Triplets (index in computed, index in reference, distance) sorted by
        reference index.
    """
    graph = nx.Graph()
    for i, a in enumerate(computed):
        for j, b in enumerate(reference):
            distance = abs(complex(a) - complex(b))
            if distance <= radius:
                graph.add_edge(("computed", i), ("reference", j), weight=2 * radius - distance, distance=distance)

    matches = []
    for u, v in nx.max_weight_matching(graph, maxcardinality=True):
        if u[0] == "reference":
            u, v = v, u

        matches.append((u[1], v[1], graph.edges[u, v]["distance"]))

    return sorted(matches, key=lambda match: match[1])
