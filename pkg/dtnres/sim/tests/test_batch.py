# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.

import numpy.testing as npt

from dtnres.sim import Cell, SimConfig, SyncIndicatorBatch, AsyncIndicatorBatch, make_batch, find_resonances
from dtnres.testing import disk_operator


def test_make_batch():
    op = disk_operator(level=1)
    with make_batch(op, SimConfig()) as batch:
        assert isinstance(batch, SyncIndicatorBatch)

    with make_batch(op, SimConfig(workers=2)) as batch:
        assert isinstance(batch, AsyncIndicatorBatch)
        assert batch.indicators([], 0) == []


def test_async_batch_matches_sync_batch():
    op = disk_operator(level=1)
    config = SimConfig()
    cells = [Cell(0.5 - 0.64j, 0.05), Cell(2 + 2j, 0.1), Cell(1.4 - 0.8j, 0.1), Cell(1 - 2j, 0.2), Cell(3 - 1j, 0.5)]

    with SyncIndicatorBatch(op, config) as batch:
        expected = batch.indicators(cells, 0)

    for workers in (2, 3):
        with AsyncIndicatorBatch(op, config, workers) as batch:
            npt.assert_allclose(batch.indicators(cells, 0), expected, rtol=1e-12)


def test_results_do_not_depend_on_worker_count():
    op = disk_operator(level=1)
    region = (0.2, 0.8, -1.0, -0.3)
    sequential = find_resonances(op, region, SimConfig(workers=1))
    parallel = find_resonances(op, region, SimConfig(workers=2))
    assert len(sequential) == len(parallel)
    for a, b in zip(sequential, parallel):
        npt.assert_allclose(a.eigenvalue, b.eigenvalue, rtol=1e-12)
        assert a.group_size == b.group_size
        assert a.cell == b.cell
