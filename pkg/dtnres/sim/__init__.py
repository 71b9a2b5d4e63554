# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.

from dtnres.sim.simsolver import Cell, SimConfig, ValidatedPole, Rejection, PoleList
from dtnres.sim.simsolver import indicator, search, find_resonances, root_cells, group_poles, merge_radius
from dtnres.sim.batch import SyncIndicatorBatch, AsyncIndicatorBatch, make_batch
