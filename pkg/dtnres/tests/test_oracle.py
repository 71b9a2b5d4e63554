# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.

import numpy as np
import numpy.testing as npt

from dtnres import oracle
from dtnres.errors import ConvergenceError
from dtnres.extended import hankel1_prime_mp, to_complex
from dtnres.testing import DISK_POLES


TABLE_REGION = (0., 2., -2.5, 0.)


def test_disk_exact_poles():
    poles = oracle.disk_exact_poles(TABLE_REGION)
    ks = [pole.k for pole in poles]
    for expected in DISK_POLES:
        assert min(abs(k - expected) for k in ks) < 1e-5

    moduli = [abs(k) for k in ks]
    assert moduli == sorted(moduli)
    for pole in poles:
        assert pole.newton_residual <= 1e-10
        assert pole.k.imag < 0
        # Independent check with the extended precision oracle.
        assert abs(to_complex(hankel1_prime_mp(pole.m, pole.k))) <= 1e-9


def test_disk_exact_poles_in_small_region():
    poles = oracle.disk_exact_poles((0.2, 0.8, -1.0, -0.3))
    assert len(poles) == 1
    npt.assert_allclose(poles[0].k, DISK_POLES[0], atol=1e-6)


def test_mie_series_boundary_condition():
    # The total field has a vanishing normal derivative on the unit circle.
    k, d = 1.5, np.array([1., 0.])
    theta = np.linspace(0, 2 * np.pi, 17)
    eps = 1e-5
    inner = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    outer = (1 + eps) * inner
    du_s = (oracle.mie_scattered_field(k, d, outer) - oracle.mie_scattered_field(k, d, inner)) / eps
    du_inc = 1j * k * (inner @ d) * np.exp(1j * k * (inner @ d))
    npt.assert_allclose(du_s + du_inc, 0, atol=1e-4)


def test_mie_series_arguments():
    npt.assert_raises(ValueError, oracle.mie_scattered_field, 0., (1, 0), [[2., 0.]])
    npt.assert_raises(ValueError, oracle.mie_scattered_field, 1., (1, 0), [[0.5, 0.]])

    # High frequency needs more terms than available.
    npt.assert_raises(ConvergenceError, oracle.mie_scattered_field, 400., (1, 0), [[1.5, 0.]])


def test_match_poles():
    computed = [1 - 1j, 2 - 1j, 2.01 - 1j]
    reference = [2.005 - 1j, 1.0001 - 1j, 5 - 5j]
    matches = oracle.match_poles(computed, reference, radius=0.1)
    assert [(i, j) for i, j, _ in matches] in ([(1, 0), (0, 1)], [(2, 0), (0, 1)])
    npt.assert_allclose(matches[1][2], 1e-4, rtol=1e-6)
    assert oracle.match_poles(computed, [], radius=1.) == []
