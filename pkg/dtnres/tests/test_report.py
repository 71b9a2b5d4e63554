# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.

import os
import math
from os.path import join as pjoin

import numpy as np
import numpy.testing as npt

from dtnres import report
from dtnres.config import RunConfig
from dtnres.mesh import load_mesh
from dtnres.oracle import DiskPole
from dtnres.sim import Cell, Rejection, ValidatedPole, PoleList
from dtnres.testing import tiny_disk_mesh
from dtnres.utils import make_temp_directory


def _poles():
    poles = [ValidatedPole(0.1 + 0.2 - 1j / 3, 1.2345678901234567e-13, Cell(0.3 - 0.333j, 2.5e-4, 11), 2),
             ValidatedPole(math.pi - math.e * 1j, 3e-10, Cell(3.1416 - 2.7183j, 2.5e-4, 11))]
    rejections = [Rejection(Cell(1 - 1j, 2.5e-4, 11), "residual", 1.01 - 1j, 1e-3),
                  Rejection(Cell(2 - 1j, 2.5e-4, 11), "refinement", message="did not converge")]
    return PoleList(poles, rejections)


def test_pole_csv_roundtrip():
    poles = _poles()
    with make_temp_directory(prefix="test_report") as tmpdir:
        path = report.write_poles_csv(poles, pjoin(tmpdir, "poles.csv"))
        with open(path) as f:
            assert f.readline().strip() == "re_k,im_k,residual,group_size,cell_center_re,cell_center_im"

        records = report.read_poles_csv(path)
        assert records == [report.PoleRecord.from_pole(pole) for pole in poles]
        # Values are reproduced exactly.
        assert records[0].k == poles[0].eigenvalue
        assert records[0].residual == poles[0].residual
        assert records[0].group_size == 2
        assert records[1].cell_center == 3.1416 - 2.7183j

        assert report.read_eigenvalues(path) == [pole.eigenvalue for pole in poles]


def test_empty_pole_csv():
    with make_temp_directory(prefix="test_report") as tmpdir:
        path = report.write_poles_csv(PoleList(), pjoin(tmpdir, "empty.csv"))
        assert report.read_poles_csv(path) == []


def test_pole_report_json():
    poles = _poles()
    config = RunConfig()
    with make_temp_directory(prefix="test_report") as tmpdir:
        path = report.write_json(report.pole_report(poles, config.to_dict()), pjoin(tmpdir, "poles.json"))
        data = report.read_json(path)

    assert data["config"]["uuid"] == config.uuid
    assert data["config"]["sim"]["n_quad"] == 16
    assert len(data["poles"]) == 2
    assert complex(data["poles"][1]["re_k"], data["poles"][1]["im_k"]) == poles[1].eigenvalue
    assert [rejection["reason"] for rejection in data["rejections"]] == ["residual", "refinement"]
    assert data["rejections"][1]["message"] == "did not converge"


def test_oracle_csv_roundtrip():
    poles = [DiskPole(1, 0.5011836 - 0.6435474j, 3e-16), DiskPole(0, 1 / 7 - 1j / 9, 0.)]
    with make_temp_directory(prefix="test_report") as tmpdir:
        path = report.write_oracle_csv(poles, pjoin(tmpdir, "reference.csv"))
        with open(path) as f:
            assert f.readline().strip() == "m,re_k,im_k,newton_residual"

        loaded = report.read_oracle_csv(path)
        assert [(p.m, p.k, p.newton_residual) for p in loaded] == [(p.m, p.k, p.newton_residual) for p in poles]

        npt.assert_raises(ValueError, report.read_poles_csv, path)


def test_convergence_table():
    exact = [0.5 - 0.6j, 1.4 - 0.8j]
    levels = [1, 2, 3, 4]
    sizes = [0.1, 0.05, 0.025, 0.0125]
    # Errors shrink by 4 from one level to the next, the second pole is lost on level 1.
    poles_per_level = [
        [exact[0] + 0.04],
        [exact[1] + 0.01, exact[0] + 0.01, 3 - 1j],
        [exact[0] + 0.0025, exact[1] + 0.0025],
        [exact[0] + 0.000625, exact[1] + 0.000625],
    ]
    rows = report.convergence_table(levels, sizes, [10, 40, 160, 640], poles_per_level)
    assert len(rows) == 4
    assert [len(row.poles) for row in rows] == [2, 2, 2, 2]
    assert rows[0].poles[1] is None
    assert rows[1].poles[1] == exact[1] + 0.01

    npt.assert_allclose(rows[0].errors[0], abs(0.04 - 0.01) / abs(exact[0] + 0.01))
    assert rows[0].errors[1] is None
    assert rows[-1].errors == [None, None]
    npt.assert_allclose(rows[0].orders[0], 2, atol=0.05)
    npt.assert_allclose(rows[1].orders[1], 2, atol=0.05)
    assert rows[0].orders[1] is None
    assert rows[2].orders == [None, None]

    with make_temp_directory(prefix="test_report") as tmpdir:
        path = report.write_convergence_csv(rows, pjoin(tmpdir, "convergence.csv"))
        loaded = report.read_convergence_csv(path)

    assert [row["level"] for row in loaded] == [1, 2, 3, 4]
    assert loaded[0]["re_k2"] is None
    assert loaded[1]["re_k2"] == (exact[1] + 0.01).real
    assert loaded[0]["order1"] == rows[0].orders[0]


def test_convergence_tracking_radius():
    rows = report.convergence_table([1, 2], [0.1, 0.05], [10, 40], [[1.2 - 1j], [1 - 1j]])
    assert rows[0].poles == [None]
    assert rows[0].errors == [None]


def test_scatter_rows():
    rows = [report.ScatterRow(level, 0.2 / 2 ** level, 10 * 4 ** level, 0.3 / 4 ** level) for level in (1, 2, 3)]
    report.scatter_orders(rows)
    assert rows[0].order is None
    npt.assert_allclose([row.order for row in rows[1:]], [2, 2])

    with make_temp_directory(prefix="test_report") as tmpdir:
        path = report.write_scatter_csv(rows, pjoin(tmpdir, "scatter.csv"))
        loaded = report.read_scatter_csv(path)

    assert [row.row() for row in loaded] == [row.row() for row in rows]


def test_export_eigenfunctions():
    mesh = tiny_disk_mesh()
    vector = np.exp(1j * np.arange(mesh.nb_vertices)) * np.linspace(1, 2, mesh.nb_vertices) * (1 - 1j)
    poles = [ValidatedPole(0.5 - 0.6j, 1e-12, Cell(0.5 - 0.6j, 1e-3), 1, vector),
             ValidatedPole(1.4 - 0.8j, 1e-12, Cell(1.4 - 0.8j, 1e-3), 1, None)]

    with make_temp_directory(prefix="test_report") as tmpdir:
        paths = report.export_eigenfunctions(mesh, poles, pjoin(tmpdir, "disk"))
        assert len(paths) == 2
        assert all(os.path.isfile(path) for path in paths)
        assert load_mesh(paths[0]) == mesh

        values = np.loadtxt(paths[1])
        assert values.shape == (mesh.nb_vertices,)
        # The largest entry is rotated onto the positive real axis.
        npt.assert_allclose(values[-1], 2 * np.sqrt(2), rtol=1e-12)
