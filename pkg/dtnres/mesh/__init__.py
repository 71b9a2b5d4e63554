# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.

from dtnres.mesh.shapes import ObstacleShape, circumradius, disk, square, lshape, polygon, make_shape
from dtnres.mesh.mesh import Mesh, GAMMA, GAMMA_R, TAGS, check_mesh, mesh_size
from dtnres.mesh.template import generate_template_mesh, refine_uniform, template_resolution, build_mesh
from dtnres.mesh.template import DEFAULT_H1
from dtnres.mesh.meshfmt import import_mesh, export_mesh, load_mesh, save_mesh
