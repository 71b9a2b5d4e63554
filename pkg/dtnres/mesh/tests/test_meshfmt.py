# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.

import os
from os.path import join as pjoin

import numpy.testing as npt

from dtnres.errors import MeshError, MeshFormatError
from dtnres.mesh import shapes
from dtnres.mesh import generate_template_mesh, refine_uniform
from dtnres.mesh import import_mesh, export_mesh, load_mesh, save_mesh
from dtnres.utils import make_temp_directory


TINY_MESH = """meshfmt 1
vertices 4
0 0
1 0
1 1
0 1
triangles 2
0 1 2
0 2 3
boundary 4
0 1 GAMMA
1 2 GAMMA
2 3 GAMMA
3 0 GAMMA
"""


def test_export_then_import_is_exact():
    shape = shapes.lshape()
    mesh = refine_uniform(generate_template_mesh(shape, 0.85, 16, 2), shape, 0.85)
    text = export_mesh(mesh)
    assert text.startswith("meshfmt 1\nvertices {}\n".format(mesh.nb_vertices))
    assert import_mesh(text) == mesh


def test_save_and_load():
    mesh = generate_template_mesh(shapes.disk(1.), 1.25, 8, 2)
    with make_temp_directory() as tmpdir:
        filename = save_mesh(mesh, pjoin(tmpdir, "disk.mesh"))
        assert os.path.isfile(filename)
        assert load_mesh(filename) == mesh


def test_syntax_error_reports_location():
    text = TINY_MESH.replace("1 1\n", "1 one\n")
    try:
        import_mesh(text)
    except MeshFormatError as e:
        assert e.line == 5
        assert e.check == "format"
        assert str(e).startswith("line 5")
    else:
        assert False, "Expecting a MeshFormatError"


def test_count_mismatch():
    text = TINY_MESH.replace("triangles 2", "triangles 3")
    npt.assert_raises(MeshFormatError, import_mesh, text)

    text = TINY_MESH.replace("meshfmt 1", "meshfmt 2")
    npt.assert_raises(MeshFormatError, import_mesh, text)


def test_invariant_violations():
    # The tiny mesh has an outer loop only.
    try:
        import_mesh(TINY_MESH)
    except MeshError as e:
        assert e.check == "loop"
    else:
        assert False, "Expecting a MeshError"

    mesh = generate_template_mesh(shapes.disk(1.), 1.25, 8, 2)
    lines = export_mesh(mesh).splitlines()
    start = lines.index("triangles 32") + 1
    i, j, k = lines[start + 7].split()
    lines[start + 7] = " ".join([i, k, j])
    try:
        import_mesh("\n".join(lines))
    except MeshError as e:
        assert e.check == "orientation"
        assert e.index == 7
    else:
        assert False, "Expecting a MeshError"
