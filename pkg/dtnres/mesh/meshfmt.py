# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.


"""
Native text format of meshes.

    meshfmt 1
    vertices <n>
    x y                 (n lines)
    triangles <m>
    i j k               (m lines, 0-based)
    boundary <e>
    i j TAG             (e lines, TAG is GAMMA or GAMMA_R)
"""

import tatsu
from tatsu.exceptions import FailedParse

from dtnres.errors import MeshFormatError
from dtnres.mesh.mesh import Mesh, TAGS, check_mesh


FORMAT_VERSION = 1

GRAMMAR = r"""
@@grammar :: MeshFormat
@@whitespace :: /[\t ]+/

start = {nl} version:header vertices:vertices triangles:triangles boundary:boundary $ ;

header = 'meshfmt' @:integer nl ;

vertices = 'vertices' count:integer nl items:{vertex_line} ;
vertex_line = @:vertex nl ;
vertex = x:real y:real ;

triangles = 'triangles' count:integer nl items:{triangle_line} ;
triangle_line = @:triangle nl ;
triangle = a:integer b:integer c:integer ;

boundary = 'boundary' count:integer nl items:{edge_line} ;
edge_line = @:edge nl ;
edge = a:integer b:integer tag:tag ;

tag = 'GAMMA_R' | 'GAMMA' ;
integer = /[0-9]+/ ;
real = /[-+]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][-+]?[0-9]+)?/ ;
nl = /(?:[ \t\r]*\n)+/ ;
"""

_MODEL = tatsu.compile(GRAMMAR)


def _line_of(node):
    info = getattr(node, "parseinfo", None)
    if info is None:
        return None

    return info.line + 1


def import_mesh(text: str) -> Mesh:
    """
    Parse a mesh from its native text representation.

    Raises:
        MeshFormatError: on syntax errors and count mismatches.
        MeshError: if the parsed mesh violates a mesh invariant.
    """
    if not text.endswith("\n"):
        text += "\n"

    try:
        ast = _MODEL.parse(text, parseinfo=True)
    except FailedParse as e:
        buf = e.tokenizer if hasattr(e, "tokenizer") else e.buf  # renamed in newer TatSu
        info = buf.line_info(e.pos)
        raise MeshFormatError("Syntax error in mesh file.", line=info.line + 1, column=info.col + 1)

    if int(ast.version) != FORMAT_VERSION:
        raise MeshFormatError("Unsupported mesh format version {}.".format(ast.version), line=1)

    for name in ("vertices", "triangles", "boundary"):
        section = ast[name]
        if int(section.count) != len(section["items"]):
            msg = "Section '{}' announces {} entries but has {}."
            raise MeshFormatError(msg.format(name, section.count, len(section["items"])), line=_line_of(section))

    vertices = [(float(v.x), float(v.y)) for v in ast.vertices["items"]]
    triangles = [(int(t.a), int(t.b), int(t.c)) for t in ast.triangles["items"]]
    boundary_edges = [(int(e.a), int(e.b)) for e in ast.boundary["items"]]
    boundary_tags = [str(e.tag) for e in ast.boundary["items"]]

    mesh = Mesh(vertices, triangles, boundary_edges, boundary_tags)
    check_mesh(mesh)
    return mesh


def export_mesh(mesh: Mesh) -> str:
    """ Native text representation of a mesh (floats with 17 significant digits). """
    lines = ["meshfmt {}".format(FORMAT_VERSION)]
    lines.append("vertices {}".format(mesh.nb_vertices))
    lines += ["{:.17g} {:.17g}".format(x, y) for x, y in mesh.vertices]
    lines.append("triangles {}".format(mesh.nb_triangles))
    lines += ["{} {} {}".format(*triangle) for triangle in mesh.triangles]
    lines.append("boundary {}".format(len(mesh.boundary_edges)))
    lines += ["{} {} {}".format(a, b, TAGS[tag]) for (a, b), tag in zip(mesh.boundary_edges, mesh.boundary_tags)]
    return "\n".join(lines) + "\n"


def load_mesh(path: str) -> Mesh:
    with open(path) as f:
        return import_mesh(f.read())


def save_mesh(mesh: Mesh, path: str) -> str:
    with open(path, "w") as f:
        f.write(export_mesh(mesh))

    return path
