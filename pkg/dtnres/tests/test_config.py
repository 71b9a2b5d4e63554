# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.

import os
import glob
import textwrap
from os.path import join as pjoin

import numpy.testing as npt

from dtnres.config import RunConfig
from dtnres.errors import ConfigError
from dtnres.mesh import save_mesh
from dtnres.testing import disk_mesh
from dtnres.utils import make_temp_directory


CONFIGS_PATH = os.path.abspath(pjoin(__file__, "..", "..", "..", "configs"))


def test_defaults():
    config = RunConfig()
    config.check()
    assert config.shape == "disk" and config.R == 1.25 and config.N == 20 and config.level == 1
    assert config.region == (0., 4., -4., 0.)


def test_loads():
    text = textwrap.dedent("""\
        # Unit disk.
        shape = disk
        R = 1.5          # inline comment

        N = 15
        region = 0.1 2 -3, -0.5
        level = 2
        seed = 7
        workers = 3
        min_cell = 1e-3
    """)
    config = RunConfig.loads(text)
    assert config.shape == "disk"
    assert config.R == 1.5
    assert config.N == 15
    assert config.region == (0.1, 2., -3., -0.5)
    assert config.level == 2
    assert config.seed == 7 and config.sim.vector_seed == 7
    assert config.workers == 3 and config.sim.workers == 3
    assert config.sim.min_cell == 1e-3
    config.check()


def test_loads_errors():
    try:
        RunConfig.loads("shape = disk\nfoo = 1\n")
        assert False, "Unknown keys should be rejected."
    except ConfigError as e:
        assert "line 2" in str(e) and "foo" in str(e)

    npt.assert_raises(ConfigError, RunConfig.loads, "R 1.5\n")
    npt.assert_raises(ConfigError, RunConfig.loads, "N = twenty\n")
    npt.assert_raises(ConfigError, RunConfig.loads, "region = 0 1 -1\n")


def test_dumps_roundtrip():
    config = RunConfig()
    config.update({"shape": "square", "R": 0.85, "region": (0., 4., -4., 0.), "seed": 3, "threshold": 0.1 + 0.2})
    assert RunConfig.loads(config.dumps()) == config


def test_precedence():
    config = RunConfig.loads("workers = 2\nlevel = 3\n")
    config.update({"level": 4, "workers": None})
    assert config.level == 4 and config.workers == 2

    config.apply_environment({"DTNRES_WORKERS": "5"})
    assert config.workers == 5

    config.apply_environment({})
    assert config.workers == 5

    npt.assert_raises(ConfigError, config.apply_environment, {"DTNRES_WORKERS": "many"})


def test_check():
    RunConfig().check()

    config = RunConfig()
    config.region = (0., 1., 0.5, 1.)  # Upper half plane.
    npt.assert_raises(ConfigError, config.check)

    config = RunConfig()
    config.region = (-0.5, 1., -1., 0.)
    npt.assert_raises(ConfigError, config.check)

    config = RunConfig()
    config.region = (1., 1., -1., 0.)
    npt.assert_raises(ConfigError, config.check)

    config = RunConfig()
    config.R = 0.9  # Does not enclose the unit disk.
    npt.assert_raises(ConfigError, config.check)

    config = RunConfig()
    config.shape = "square"
    config.R = 0.7  # Circumradius is √2 / 2.
    npt.assert_raises(ConfigError, config.check)
    config.R = 0.85
    config.check()

    config = RunConfig()
    config.shape = "hexagon"
    npt.assert_raises(ConfigError, config.check)

    config = RunConfig()
    config.sim.n_quad = 2
    npt.assert_raises(ConfigError, config.check)


def test_uuid():
    config = RunConfig()
    assert config.uuid.startswith("dtn-disk-")
    assert config.copy().uuid == config.uuid

    other = config.copy()
    other.level = 2
    assert other.uuid != config.uuid
    assert config.level == 1


def test_mesh_file_shape():
    with make_temp_directory(prefix="test_config") as tmpdir:
        path = save_mesh(disk_mesh(1), pjoin(tmpdir, "disk.mesh"))
        config = RunConfig()
        config.shape = path
        config.check()
        assert config.is_mesh_file
        assert config.obstacle() is None
        assert config.uuid.startswith("dtn-disk-")
        assert config.build_mesh() == disk_mesh(1)


def test_checked_in_configs():
    paths = sorted(glob.glob(pjoin(CONFIGS_PATH, "*.cfg")))
    assert len(paths) > 0
    for path in paths:
        config = RunConfig.load(path)
        config.check()
        assert config.level == 5
        assert config.N == 20


def test_load_missing_file():
    npt.assert_raises(ConfigError, RunConfig.load, "/nonexistent/run.cfg")
