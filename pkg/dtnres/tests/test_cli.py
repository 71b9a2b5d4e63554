# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.

import os
import glob
import json
from os.path import join as pjoin

import numpy.testing as npt

from dtnres import cli, report
from dtnres.config import RunConfig
from dtnres.errors import ConfigError
from dtnres.mesh import load_mesh
from dtnres.testing import DISK_POLES, capture_stdout, disk_mesh
from dtnres.utils import make_temp_directory


SMALL_RUN = ["--shape", "disk", "--level", "1", "-N", "10", "--region", "0.2", "0.8", "-1.0", "-0.3"]


def test_parser():
    parser = cli.build_parser()
    args = parser.parse_args(["solve"] + SMALL_RUN + ["--seed", "3", "-v"])
    assert args.command == "solve"
    assert args.region == [0.2, 0.8, -1.0, -0.3]
    assert args.verbose and not args.very_verbose

    config = cli.make_config(args)
    assert config.level == 1 and config.N == 10 and config.seed == 3
    assert config.region == [0.2, 0.8, -1.0, -0.3]

    npt.assert_raises(SystemExit, parser.parse_args, [])
    npt.assert_raises(SystemExit, parser.parse_args, ["solve", "--level", "one"])

    args = parser.parse_args(["scatter-check"])
    assert args.N == 20 and args.R == 1.25 and args.levels == [1, 2, 3, 4]


def test_flags_override_config_file():
    with make_temp_directory(prefix="test_cli") as tmpdir:
        path = pjoin(tmpdir, "run.cfg")
        with open(path, "w") as f:
            f.write("shape = square\nR = 0.85\nlevel = 3\nseed = 5\n")

        args = cli.build_parser().parse_args(["solve", "--config", path, "--level", "2"])
        config = cli.make_config(args)

    assert config.shape == "square" and config.R == 0.85
    assert config.level == 2
    assert config.seed == 5


def test_solve():
    with make_temp_directory(prefix="test_cli") as tmpdir:
        with capture_stdout() as out:
            code = cli.main(["solve"] + SMALL_RUN + ["--out-dir", tmpdir, "--export-modes"])

        assert code == 0
        assert "poles found" in out.getvalue()

        config = RunConfig.loads("level = 1\nN = 10\nregion = 0.2 0.8 -1.0 -0.3\nout_dir = {}\n".format(tmpdir))
        records = report.read_poles_csv(config.output_path(".csv"))
        assert len(records) == 1
        for record in records:
            assert abs(record.k - DISK_POLES[0]) < 2e-2
            assert record.residual <= 1e-8

        with open(config.output_path(".json")) as f:
            data = json.load(f)

        assert data["config"]["uuid"] == config.uuid
        assert len(data["poles"]) == len(records)

        assert load_mesh(config.output_path(".mesh")) == disk_mesh(1)
        assert len(glob.glob(config.output_path("-mode*.txt"))) == len(records)


def test_invalid_region_is_rejected():
    with make_temp_directory(prefix="test_cli") as tmpdir:
        code = cli.main(["solve", "--region", "0", "1", "0.5", "1", "--out-dir", tmpdir])
        assert code == 2
        assert os.listdir(tmpdir) == []

    code = cli.main(["solve", "--config", "/nonexistent/run.cfg"])
    assert code == 2


def test_reference():
    with make_temp_directory(prefix="test_cli") as tmpdir:
        output = pjoin(tmpdir, "reference.csv")
        assert cli.main(["reference", "--region", "0", "2", "-2.5", "0", "--output", output]) == 0
        poles = report.read_oracle_csv(output)

    for expected in DISK_POLES:
        assert min(abs(pole.k - expected) for pole in poles) < 1e-5

    assert all(pole.newton_residual <= 1e-12 for pole in poles)


def test_scatter_check():
    rows = cli.cmd_scatter_check(1., [1, 2, 3])
    errors = [row.l2_error for row in rows]
    assert errors == sorted(errors, reverse=True)
    assert rows[0].order is None
    for row in rows[1:]:
        assert 1.5 <= row.order <= 2.5

    npt.assert_raises(ConfigError, cli.cmd_scatter_check, 0., [1, 2])
    assert cli.main(["scatter-check", "-k", "0"]) == 2


def test_convergence():
    with make_temp_directory(prefix="test_cli") as tmpdir:
        config = RunConfig.loads("level = 1\nN = 10\nregion = 0.2 0.8 -1.0 -0.3\nout_dir = {}\n".format(tmpdir))
        output = pjoin(tmpdir, "convergence.csv")
        rows = cli.cmd_convergence(config, [1, 2, 3], output=output)

        assert [row.level for row in rows] == [1, 2, 3]
        assert len(rows[0].poles) == 1
        assert abs(rows[-1].poles[0] - DISK_POLES[0]) < 1e-3
        assert rows[0].errors[0] > rows[1].errors[0] > 0
        assert 1.5 <= rows[0].orders[0] <= 2.5

        table = report.read_convergence_csv(output)
        assert len(table) == 3


def test_convergence_needs_two_levels():
    config = RunConfig()
    npt.assert_raises(ConfigError, cli.cmd_convergence, config, [2])


def test_mesh():
    with make_temp_directory(prefix="test_cli") as tmpdir:
        output = pjoin(tmpdir, "square.mesh")
        assert cli.main(["mesh", "--shape", "square", "-R", "0.85", "--output", output]) == 0
        mesh = load_mesh(output)

    assert mesh.nb_triangles > 0
