# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.

import unittest

import numpy as np
import numpy.testing as npt

from dtnres.errors import RangeError
from dtnres.nep import ResonanceOperator
from dtnres.oracle import disk_exact_poles, match_poles
from dtnres.sim import simsolver
from dtnres.sim.simsolver import Cell, SimConfig, ValidatedPole
from dtnres.testing import DISK_POLES, disk_operator


REGION = (0.2, 0.8, -1.0, -0.3)


def test_cell():
    cell = Cell(1 - 1j, 0.5)
    npt.assert_allclose(cell.contour_radius(1.25), 1.25 * np.sqrt(2) * 0.5)
    children = cell.children()
    assert len(children) == 4
    assert all(child.half_width == 0.25 and child.depth == 1 for child in children)
    npt.assert_allclose(sorted(child.center.real for child in children), [0.75, 0.75, 1.25, 1.25])
    assert cell.contains(1.4 - 0.6j)
    assert not cell.contains(1.6 - 1j)
    assert cell.contains(1.6 - 1j, inflate=10)
    assert cell.bounds() == (0.5, 1.5, -1.5, -0.5)


def test_sim_config():
    config = SimConfig()
    config.check()
    assert config.n_quad == 16 and config.min_cell == 5e-4 and config.threshold_deep == 1e-4
    assert config.copy() == config

    npt.assert_raises(ValueError, SimConfig(n_quad=4).check)
    npt.assert_raises(ValueError, SimConfig(contour_inflate=1.).check)
    npt.assert_raises(ValueError, SimConfig(min_cell=0.).check)
    npt.assert_raises(ValueError, SimConfig, unknown_parameter=1)


def test_root_cells():
    config = SimConfig()
    cells = simsolver.root_cells((0., 2., -1., 0.), config)
    assert [cell.center for cell in cells] == [0.5 - 0.5j, 1.5 - 0.5j]

    cells = simsolver.root_cells(REGION, config)
    assert len(cells) == 1
    assert cells[0].half_width <= config.root_half_width
    npt.assert_allclose(cells[0].bounds(), (0.2, 0.9, -1.0, -0.3))


def test_group_poles_is_order_independent():
    cell = Cell(1 - 1j, 1e-3)
    poles = [ValidatedPole(1 - 1j, 1e-10, cell), ValidatedPole(1 - 1j + 5e-7, 1e-12, cell),
             ValidatedPole(1 - 1j + 1e-6, 1e-11, cell), ValidatedPole(2 - 1j, 1e-10, cell)]

    for order in ([0, 1, 2, 3], [3, 2, 1, 0], [2, 0, 3, 1]):
        merged = simsolver.group_poles([poles[i] for i in order], 1e-6)
        merged.sort(key=lambda pole: pole.eigenvalue.real)
        assert [pole.group_size for pole in merged] == [3, 1]
        assert merged[0].residual == 1e-12


def test_group_poles_scales_with_mesh_size():
    cell = Cell(0.5 - 0.64j, 1e-3)
    # A double pole split by 2.6e-6 on a coarse mesh.
    split = [ValidatedPole(0.501135 - 0.643926j, 1e-16, cell), ValidatedPole(0.5011376 - 0.6439266j, 2e-16, cell)]
    assert len(simsolver.group_poles(split, 1e-6)) == 2

    merged = simsolver.group_poles(split, 1e-6, h=np.pi / 25, scale=1e-2)
    assert len(merged) == 1
    assert merged[0].group_size == 2
    assert merged[0].residual == 1e-16

    # Pairs 8e-6 apart stay distinct on a fine mesh.
    pair = [ValidatedPole(0.881407 - 1.094483j, 1e-12, cell), ValidatedPole(0.881408 - 1.094491j, 1e-12, cell)]
    assert len(simsolver.group_poles(pair, 1e-6, h=np.pi / 400, scale=1e-2)) == 2

    npt.assert_allclose(simsolver.merge_radius(1e-6, 1e-2, 0.1, 3 - 4j), 1e-2 * 0.25)
    assert simsolver.merge_radius(1e-6, 1e-2, 0., 3 - 4j) == 1e-6


class TestSpectralIndicator(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.op = disk_operator(level=1)
        cls.config = SimConfig()

    def test_empty_cell(self):
        delta = simsolver.indicator(self.op, Cell(2 + 2j, 0.1), self.config)
        assert delta <= 1e-6

        delta = simsolver.indicator(self.op, Cell(2 - 0.2j, 0.1), self.config)
        assert delta <= 1e-6

    def test_cell_with_pole(self):
        delta = simsolver.indicator(self.op, Cell(0.5 - 0.64j, 0.05), self.config)
        assert delta > self.config.threshold

    def test_search(self):
        cells = simsolver.search(self.op, REGION, self.config)
        assert len(cells) > 0
        for cell in cells:
            assert cell.half_width <= self.config.min_cell
            assert abs(cell.center - DISK_POLES[0]) < 3e-2

        centers = [(cell.center.real, cell.center.imag) for cell in cells]
        assert centers == sorted(centers)

    def test_search_near_origin(self):
        cells = simsolver.search(self.op, (0., 0.3, -0.3, 0.), self.config)
        assert cells == []

    def test_find_resonances(self):
        poles = simsolver.find_resonances(self.op, REGION, self.config)
        assert len(poles) == 1
        assert isinstance(poles.rejections, list)
        for pole in poles:
            assert abs(pole.eigenvalue - DISK_POLES[0]) < 2e-2
            assert pole.residual <= self.config.residual_tol
            assert pole.group_size >= 1
            npt.assert_allclose(np.linalg.norm(pole.vector), 1.)

        moduli = [abs(pole.eigenvalue) for pole in poles]
        assert moduli == sorted(moduli)

    def test_find_resonances_is_deterministic(self):
        first = simsolver.find_resonances(self.op, REGION, self.config)
        second = simsolver.find_resonances(self.op, REGION, self.config)
        assert [pole.eigenvalue for pole in first] == [pole.eigenvalue for pole in second]


class _OutOfRangeOperator(ResonanceOperator):
    """ Operator whose special functions fail for Re k > 0.7. """

    def factorize(self, k):
        if complex(k).real > 0.7:
            raise RangeError("kR={} is out of range".format(k * self.R))

        return super().factorize(k)


def test_evaluation_errors_become_rejections():
    op = disk_operator(level=1)
    op = _OutOfRangeOperator(op.S1, op.S2, op.fourier, mesh=op.mesh)
    config = SimConfig(min_cell=1e-2, workers=2)
    poles = simsolver.find_resonances(op, REGION, config)

    assert len(poles) == 1
    assert abs(poles[0].eigenvalue - DISK_POLES[0]) < 2e-2
    evaluation = [rejection for rejection in poles.rejections if rejection.reason == "evaluation"]
    assert len(evaluation) > 0
    assert all(rejection.message.startswith("RangeError") for rejection in evaluation)
    assert any(rejection.cell.center.real > 0.7 for rejection in evaluation)


def test_refine_candidate_returns_errors():
    op = disk_operator(level=1)
    op = _OutOfRangeOperator(op.S1, op.S2, op.fourier, mesh=op.mesh)
    outcome = simsolver.refine_candidate(op, 0.75 - 0.5j, SimConfig())
    assert isinstance(outcome, RangeError)


def test_disk_poles_match_exact_poles_one_to_one():
    # Every exact pole in the region is found once and nothing else is.
    region = (0., 2., -2.5, 0.)
    op = disk_operator(level=2, N=20)
    poles = simsolver.find_resonances(op, region, SimConfig())
    exact = [pole.k for pole in disk_exact_poles(region, m_max=12)]
    assert len(exact) >= len(DISK_POLES)

    # Poles this close to the border may cross it under discretization.
    def interior(k, margin=5e-2):
        return min(k.real - region[0], region[1] - k.real, k.imag - region[2], region[3] - k.imag) > margin

    computed = [pole.eigenvalue for pole in poles]
    for k in filter(interior, exact):
        assert sum(abs(other - k) < 5e-2 for other in computed) == 1
    for k in filter(interior, computed):
        assert min(abs(other - k) for other in exact) < 5e-2
    assert len(match_poles(computed, exact, radius=5e-2)) >= len(list(filter(interior, exact)))
