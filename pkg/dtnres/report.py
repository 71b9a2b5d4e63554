# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.


"""
Result files: pole reports, oracle tables, convergence and scattering tables.

Floats are written with 17 significant digits so reading a file back gives
the same values.
"""

import csv
import json
import math
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from dtnres.mesh import Mesh, save_mesh
from dtnres.oracle import DiskPole
from dtnres.sim import ValidatedPole, PoleList


POLE_FIELDS = ["re_k", "im_k", "residual", "group_size", "cell_center_re", "cell_center_im"]
ORACLE_FIELDS = ["m", "re_k", "im_k", "newton_residual"]
SCATTER_FIELDS = ["level", "h", "ndof", "l2_error", "order"]

#: Distance under which a pole is tracked from one level to the next.
TRACKING_RADIUS = 0.1


def format_value(value) -> str:
    if value is None:
        return ""

    if isinstance(value, (bool, np.bool_)):
        return str(int(value))

    if isinstance(value, (int, np.integer)):
        return str(int(value))

    return "{:.17g}".format(float(value))


def _optional_float(text: str) -> Optional[float]:
    return None if text == "" else float(text)


def write_csv(path: str, fields: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([format_value(value) for value in row])

    return path


def read_csv(path: str, fields: Sequence[str]) -> List[Dict[str, str]]:
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or list(reader.fieldnames[:len(fields)]) != list(fields):
            raise ValueError("{}: expecting columns {}, got {}.".format(path, ",".join(fields), reader.fieldnames))

        return list(reader)


class PoleRecord:
    """ One row of a pole report. """

    def __init__(self, k: complex, residual: float, group_size: int, cell_center: complex) -> None:
        self.k = complex(k)
        self.residual = residual
        self.group_size = group_size
        self.cell_center = complex(cell_center)

    @classmethod
    def from_pole(cls, pole: ValidatedPole) -> "PoleRecord":
        return cls(pole.eigenvalue, pole.residual, pole.group_size, pole.cell.center)

    def row(self) -> list:
        return [self.k.real, self.k.imag, self.residual, self.group_size,
                self.cell_center.real, self.cell_center.imag]

    def to_dict(self) -> Dict[str, Any]:
        return dict(zip(POLE_FIELDS, self.row()))

    def __eq__(self, other) -> bool:
        return isinstance(other, PoleRecord) and self.row() == other.row()

    def __repr__(self) -> str:
        return "PoleRecord({:.17g}, residual={:.3g}, group_size={})".format(self.k, self.residual, self.group_size)


def write_poles_csv(poles: Sequence[ValidatedPole], path: str) -> str:
    return write_csv(path, POLE_FIELDS, [PoleRecord.from_pole(pole).row() for pole in poles])


def read_poles_csv(path: str) -> List[PoleRecord]:
    records = []
    for row in read_csv(path, POLE_FIELDS):
        records.append(PoleRecord(complex(float(row["re_k"]), float(row["im_k"])), float(row["residual"]),
                                  int(row["group_size"]),
                                  complex(float(row["cell_center_re"]), float(row["cell_center_im"]))))

    return records


def pole_report(poles: PoleList, config: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """ JSON-serializable report: configuration, poles and rejected candidates. """
    return {
        "config": config or {},
        "poles": [PoleRecord.from_pole(pole).to_dict() for pole in poles],
        "rejections": [rejection.to_dict() for rejection in getattr(poles, "rejections", [])],
    }


def write_json(data: Dict[str, Any], path: str) -> str:
    with open(path, "w") as f:
        json.dump(data, f, indent=2)

    return path


def read_json(path: str) -> Dict[str, Any]:
    with open(path) as f:
        return json.load(f)


def write_oracle_csv(poles: Sequence[DiskPole], path: str) -> str:
    rows = [[pole.m, pole.k.real, pole.k.imag, pole.newton_residual] for pole in poles]
    return write_csv(path, ORACLE_FIELDS, rows)


def read_oracle_csv(path: str) -> List[DiskPole]:
    return [DiskPole(int(row["m"]), complex(float(row["re_k"]), float(row["im_k"])), float(row["newton_residual"]))
            for row in read_csv(path, ORACLE_FIELDS)]


def read_eigenvalues(path: str) -> List[complex]:
    """ Complex values of a pole report or an oracle table. """
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        return [complex(float(row["re_k"]), float(row["im_k"])) for row in reader]


def _order(coarse: Optional[float], fine: Optional[float], ratio: float = 2.) -> Optional[float]:
    if not coarse or not fine or not np.isfinite(coarse) or not np.isfinite(fine):
        return None

    return math.log(coarse / fine) / math.log(ratio)


class ConvergenceRow:
    """
    Poles tracked at one refinement level.

    Attributes:
        level: Refinement level j.
        h: Mesh size.
        ndof: Number of unknowns.
        poles: Tracked pole k^j of each track (None when lost).
        errors: E_j = |k^j - k^{j+1}| / |k^{j+1}| (None on the finest level).
        orders: log₂(E_j / E_{j+1}) (None when undefined).
    """

    def __init__(self, level: int, h: float, ndof: int, poles: Sequence[Optional[complex]]) -> None:
        self.level = level
        self.h = h
        self.ndof = ndof
        self.poles = list(poles)
        self.errors = [None] * len(self.poles)
        self.orders = [None] * len(self.poles)

    @staticmethod
    def fields(nb_tracks: int) -> List[str]:
        fields = ["level", "h", "ndof"]
        for i in range(1, nb_tracks + 1):
            fields += ["re_k{}".format(i), "im_k{}".format(i), "error{}".format(i), "order{}".format(i)]

        return fields

    def row(self) -> list:
        row = [self.level, self.h, self.ndof]
        for k, error, order in zip(self.poles, self.errors, self.orders):
            row += [None if k is None else k.real, None if k is None else k.imag, error, order]

        return row


def _nearest(k: complex, candidates: Sequence[complex], radius: float) -> Optional[complex]:
    if len(candidates) == 0:
        return None

    distances = [abs(k - c) for c in candidates]
    best = int(np.argmin(distances))
    return candidates[best] if distances[best] <= radius else None


def convergence_table(levels: Sequence[int], sizes: Sequence[float], ndofs: Sequence[int],
                      poles_per_level: Sequence[Sequence[complex]], nb_tracks: Optional[int] = None,
                      radius: float = TRACKING_RADIUS) -> List[ConvergenceRow]:
    """
    Follow the poles of the finest level down to the coarsest one.

    Tracks start at the finest level's poles (smallest modulus first) and
    move to the previous level by nearest neighbour within `radius`.
    """
    finest = sorted(poles_per_level[-1], key=lambda k: (abs(k), k.real))
    if nb_tracks is not None:
        finest = finest[:nb_tracks]

    tracks = [finest]
    for poles in reversed(poles_per_level[:-1]):
        previous = tracks[0]
        tracks.insert(0, [None if k is None else _nearest(k, list(poles), radius) for k in previous])

    rows = [ConvergenceRow(level, h, ndof, track) for level, h, ndof, track in zip(levels, sizes, ndofs, tracks)]
    for j in range(len(rows) - 1):
        for i, (k, k_next) in enumerate(zip(rows[j].poles, rows[j + 1].poles)):
            if k is not None and k_next is not None:
                rows[j].errors[i] = abs(k - k_next) / abs(k_next)

    for j in range(len(rows) - 1):
        for i in range(len(finest)):
            rows[j].orders[i] = _order(rows[j].errors[i], rows[j + 1].errors[i])

    return rows


def write_convergence_csv(rows: Sequence[ConvergenceRow], path: str) -> str:
    nb_tracks = len(rows[0].poles) if rows else 0
    return write_csv(path, ConvergenceRow.fields(nb_tracks), [row.row() for row in rows])


def read_convergence_csv(path: str) -> List[Dict[str, Optional[float]]]:
    with open(path, newline="") as f:
        return [{key: _optional_float(value) for key, value in row.items()} for row in csv.DictReader(f)]


class ScatterRow:
    """ L² error of a fixed-k scattering solve at one level. """

    def __init__(self, level: int, h: float, ndof: int, l2_error: float, order: Optional[float] = None) -> None:
        self.level = level
        self.h = h
        self.ndof = ndof
        self.l2_error = l2_error
        self.order = order

    def row(self) -> list:
        return [self.level, self.h, self.ndof, self.l2_error, self.order]


def scatter_orders(rows: Sequence[ScatterRow]) -> List[ScatterRow]:
    """ Observed order log(E_{j-1}/E_j) / log(h_{j-1}/h_j) of each row but the first. """
    for coarse, fine in zip(rows[:-1], rows[1:]):
        fine.order = _order(coarse.l2_error, fine.l2_error, coarse.h / fine.h)

    return list(rows)


def write_scatter_csv(rows: Sequence[ScatterRow], path: str) -> str:
    return write_csv(path, SCATTER_FIELDS, [row.row() for row in rows])


def read_scatter_csv(path: str) -> List[ScatterRow]:
    return [ScatterRow(int(row["level"]), float(row["h"]), int(row["ndof"]), float(row["l2_error"]),
                       _optional_float(row["order"]))
            for row in read_csv(path, SCATTER_FIELDS)]


def _fix_phase(vector: np.ndarray) -> np.ndarray:
    """ Rotate so the largest entry is real and positive. """
    peak = vector[np.argmax(np.abs(vector))]
    return vector * (abs(peak) / peak) if peak != 0 else vector


def export_eigenfunctions(mesh: Mesh, poles: Sequence[ValidatedPole], stem: str) -> List[str]:
    """
    Write the mesh and the real part of each eigenfunction at the vertices.

    Returns:
        Paths of the mesh file followed by one `<stem>-mode<i>.txt` per
        pole that carries an eigenvector.
    """
    paths = [save_mesh(mesh, stem + ".mesh")]
    for i, pole in enumerate(poles, start=1):
        if pole.vector is None:
            continue

        values = np.real(_fix_phase(np.asarray(pole.vector)))
        path = "{}-mode{}.txt".format(stem, i)
        header = "k = {:.17g} {:+.17g}j".format(pole.eigenvalue.real, pole.eigenvalue.imag)
        np.savetxt(path, values, fmt="%.17g", header=header)
        paths.append(path)

    return paths
