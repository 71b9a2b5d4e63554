# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.


import os
import copy
import textwrap
from os.path import join as pjoin
from typing import Any, Callable, Dict, Mapping, Optional, Tuple

from dtnres.errors import ConfigError, DtnresError
from dtnres.mesh import Mesh, ObstacleShape, make_shape, circumradius, build_mesh, load_mesh, check_mesh
from dtnres.nep import SOLVERS
from dtnres.sim import SimConfig
from dtnres.utils import encode_seeds


NAMED_SHAPES = ("disk", "square", "lshape")

#: Environment variable overriding the number of workers.
WORKERS_ENV = "DTNRES_WORKERS"


def _parse_region(text: str) -> Tuple[float, float, float, float]:
    values = text.replace(",", " ").split()
    if len(values) != 4:
        raise ValueError("region needs 4 numbers (re_min re_max im_min im_max), got {!r}".format(text))

    return tuple(float(v) for v in values)


def _parse_int(text: str) -> int:
    return int(str(text).strip())


#: Keys accepted in a configuration file and how to read their value.
FILE_KEYS: Dict[str, Callable[[str], Any]] = {
    "shape": str.strip,
    "R": float,
    "N": _parse_int,
    "region": _parse_region,
    "level": _parse_int,
    "n_quad": _parse_int,
    "threshold": float,
    "min_cell": float,
    "seed": _parse_int,
    "dedupe_radius": float,
    "residual_tol": float,
    "workers": _parse_int,
    "out_dir": str.strip,
    "solver": str.strip,
}

# Keys stored on the SimConfig, under their SimConfig name.
_SIM_KEYS = {"n_quad": "n_quad", "threshold": "threshold", "min_cell": "min_cell", "seed": "vector_seed",
             "dedupe_radius": "dedupe_radius", "residual_tol": "residual_tol", "workers": "workers"}


def _millis(value: float) -> int:
    return int(round(abs(value) * 1000))


class RunConfig:
    """
    Everything a command line run needs.

    Attributes:
        shape (str):
            Obstacle: 'disk', 'square', 'lshape' or the path of a mesh file
            in the native format.
        R (float):
            Radius of the artificial boundary Γ_R.
        N (int):
            Highest Fourier mode of the truncated DtN map.
        region (Tuple[float, float, float, float]):
            Search rectangle (re_min, re_max, im_min, im_max).
        level (int):
            Refinement level of the mesh (1 is the template mesh).
        solver (str):
            Resolvent strategy of the operator ('lowrank' or 'direct').
        out_dir (str):
            Folder where the reports are written.
        sim (SimConfig):
            Parameters of the spectral indicator search (see
            :py:class:`dtnres.sim.SimConfig`). `n_quad`, `threshold`,
            `min_cell`, `seed`, `dedupe_radius`, `residual_tol` and `workers`
            are also reachable from the run config.
    """

    def __init__(self):
        self.sim = SimConfig()
        self.shape = "disk"
        self.R = 1.25
        self.N = 20
        self.region = (0., 4., -4., 0.)
        self.level = 1
        self.solver = "lowrank"
        self.out_dir = "."

    @property
    def seed(self) -> int:
        return self.sim.vector_seed

    @seed.setter
    def seed(self, value: int) -> None:
        self.sim.vector_seed = value

    @property
    def workers(self) -> int:
        return self.sim.workers

    @workers.setter
    def workers(self, value: int) -> None:
        self.sim.workers = value

    def set(self, key: str, value: Any) -> None:
        """ Set an option by its configuration file name. """
        if key not in FILE_KEYS:
            raise ConfigError("Unknown option: {}".format(key))

        if key in _SIM_KEYS:
            setattr(self.sim, _SIM_KEYS[key], value)
        else:
            setattr(self, key, value)

    def update(self, overrides: Mapping[str, Any]) -> "RunConfig":
        """ Apply overrides, skipping the ones set to None. """
        for key, value in overrides.items():
            if value is not None:
                self.set(key, value)

        return self

    def apply_environment(self, environ: Optional[Mapping[str, str]] = None) -> "RunConfig":
        environ = os.environ if environ is None else environ
        if environ.get(WORKERS_ENV):
            try:
                self.workers = _parse_int(environ[WORKERS_ENV])
            except ValueError:
                raise ConfigError("{} must be an integer, got {!r}".format(WORKERS_ENV, environ[WORKERS_ENV]))

        return self

    @classmethod
    def loads(cls, text: str, config: Optional["RunConfig"] = None) -> "RunConfig":
        """
        Read `key = value` lines.

        Blank lines and `#` comments are ignored. Unknown keys and
        unreadable values raise :py:class:`ConfigError` naming the line.
        """
        config = config or cls()
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue

            if "=" not in line:
                raise ConfigError("line {}: expecting 'key = value', got {!r}".format(lineno, line))

            key, value = (part.strip() for part in line.split("=", 1))
            if key not in FILE_KEYS:
                raise ConfigError("line {}: unknown key '{}'".format(lineno, key))

            try:
                config.set(key, FILE_KEYS[key](value))
            except ValueError as e:
                raise ConfigError("line {}: invalid value for '{}': {}".format(lineno, key, e))

        return config

    @classmethod
    def load(cls, path: str, config: Optional["RunConfig"] = None) -> "RunConfig":
        try:
            with open(path) as f:
                text = f.read()
        except OSError as e:
            raise ConfigError("Cannot read config file: {}".format(e))

        try:
            return cls.loads(text, config)
        except ConfigError as e:
            raise ConfigError("{}: {}".format(path, e))

    def dumps(self) -> str:
        lines = []
        for key in FILE_KEYS:
            value = self.sim.__dict__[_SIM_KEYS[key]] if key in _SIM_KEYS else getattr(self, key)
            if key == "region":
                value = " ".join("{!r}".format(float(v)) for v in value)

            lines.append("{} = {}".format(key, value))

        return "\n".join(lines) + "\n"

    @property
    def is_mesh_file(self) -> bool:
        return self.shape not in NAMED_SHAPES

    def obstacle(self) -> Optional[ObstacleShape]:
        """ Shape of the obstacle, None when the geometry comes from a mesh file. """
        if self.is_mesh_file:
            return None

        return make_shape(self.shape)

    def check(self) -> None:
        """
        Raises:
            ConfigError: for any invalid option.
        """
        re_min, re_max, im_min, im_max = self.region
        if re_min < 0 or im_max > 0:
            raise ConfigError("region {} must lie in the closed fourth quadrant.".format(self.region))

        if re_max <= re_min or im_max <= im_min:
            raise ConfigError("region {} has no extent.".format(self.region))

        if self.level < 1:
            raise ConfigError("level must be >= 1, got {}.".format(self.level))

        if self.N < 0:
            raise ConfigError("N must be >= 0, got {}.".format(self.N))

        if self.solver not in SOLVERS:
            raise ConfigError("Unknown solver '{}'. Expecting one of {}.".format(self.solver, SOLVERS))

        try:
            self.sim.check()
        except ValueError as e:
            raise ConfigError(str(e))

        if self.is_mesh_file:
            if not os.path.isfile(self.shape):
                raise ConfigError("Unknown shape '{}': neither {} nor a mesh file.".format(self.shape, NAMED_SHAPES))

            return

        try:
            radius = circumradius(self.obstacle())
        except DtnresError as e:
            raise ConfigError(str(e))

        if self.R <= radius:
            raise ConfigError("R={} must exceed the circumradius {:.6g} of the {}.".format(self.R, radius, self.shape))

    def build_mesh(self) -> Mesh:
        """ Mesh of the configured geometry at the configured level (mesh files are used as is). """
        if not self.is_mesh_file:
            return build_mesh(self.obstacle(), self.R, self.level)

        mesh = load_mesh(self.shape)
        check_mesh(mesh, self.R)
        return mesh

    def copy(self) -> "RunConfig":
        config = copy.copy(self)
        config.sim = self.sim.copy()
        return config

    @property
    def shape_name(self) -> str:
        if self.is_mesh_file:
            return os.path.splitext(os.path.basename(self.shape))[0]

        return self.shape

    @property
    def uuid(self) -> str:
        uuid = "dtn-{shape}-{specs}"
        specs = [self.level, self.N, _millis(self.R), self.seed] + [_millis(v) for v in self.region]
        return uuid.format(shape=self.shape_name, specs=encode_seeds(specs))

    def output_path(self, suffix: str) -> str:
        return pjoin(self.out_dir, self.uuid + suffix)

    def to_dict(self) -> Dict[str, Any]:
        data = {"shape": self.shape, "R": self.R, "N": self.N, "region": list(self.region),
                "level": self.level, "solver": self.solver, "out_dir": self.out_dir, "uuid": self.uuid}
        data["sim"] = dict(vars(self.sim))
        return data

    def __eq__(self, other) -> bool:
        return (isinstance(other, RunConfig) and self.sim == other.sim
                and self.to_dict() == other.to_dict())

    def __str__(self) -> str:
        infos = ["-= Run options =-"]
        for slot in ["shape", "R", "N", "region", "level", "solver", "out_dir"]:
            infos.append("{}: {}".format(slot, getattr(self, slot)))

        text = "\n  ".join(infos)
        text += "\n  SIM options:\n"
        text += textwrap.indent("\n".join("{}: {}".format(k, v) for k, v in vars(self.sim).items()), "    ")
        return text
