# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.


import io
import sys
import contextlib
import functools

from dtnres.mesh import shapes, build_mesh, generate_template_mesh
from dtnres.nep import ResonanceOperator


#: Disk resonances of the unit disk (level 5 mesh, R = 1.25).
DISK_POLES = [0.501184 - 0.643547j, 1.434443 - 0.834553j, 0.440810 - 1.981650j]

#: Square of side 1 (R = 0.85).
SQUARE_POLES = [0.881407 - 1.094483j, 0.881408 - 1.094491j, 2.415253 - 1.022837j, 2.413574 - 1.761821j,
                0.753148 - 3.384440j, 0.753157 - 3.384468j, 3.962260 - 1.585959j, 3.962286 - 1.585985j]

#: L-shape (-1/2, 1/2)² minus [0, 1/2]² (R = 0.85).
LSHAPE_POLES = [1.061307 - 1.097954j, 0.916086 - 1.292350j, 2.594561 - 1.323668j, 2.663826 - 1.362413j,
                0.824321 - 3.733939j, 0.873533 - 3.726105j, 3.896025 - 1.388263j]


@contextlib.contextmanager
def capture_stdout():
    stdout_bak = sys.stdout
    sys.stdout = out = io.StringIO()
    try:
        yield out
    finally:
        sys.stdout = stdout_bak


def tiny_disk_mesh():
    """ 24 vertices, 32 triangles. """
    return generate_template_mesh(shapes.disk(1.), 1.25, 8, 2)


@functools.lru_cache(maxsize=8)
def disk_mesh(level: int = 1, R: float = 1.25):
    return build_mesh(shapes.disk(1.), R, level)


@functools.lru_cache(maxsize=8)
def disk_operator(level: int = 1, R: float = 1.25, N: int = 10, solver: str = "lowrank") -> ResonanceOperator:
    """ Operator of the unit disk; cached since several tests share it. """
    return ResonanceOperator.from_mesh(disk_mesh(level, R), R, N, solver=solver)
