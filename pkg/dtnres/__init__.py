# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.

from dtnres.version import __version__

from dtnres.errors import DtnresError, DtnresWarning, ResolutionWarning, SearchWarning

from dtnres.mesh import Mesh, build_mesh, load_mesh, save_mesh, make_shape
from dtnres.nep import ResonanceOperator, EigenPair, refine_eigenpair, solve_scattering
from dtnres.sim import SimConfig, find_resonances
from dtnres.oracle import disk_exact_poles, mie_scattered_field
from dtnres.config import RunConfig
