# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.


"""
Command line interface of dtnres (the `dtn-res` script).
"""

import sys
import logging
import argparse
import warnings
from typing import List, Optional, Sequence, Tuple

from tqdm import tqdm

from dtnres.version import __version__
from dtnres.config import RunConfig, FILE_KEYS
from dtnres.errors import ConfigError, DtnresError, DtnresWarning
from dtnres.mesh import Mesh, shapes, build_mesh, save_mesh
from dtnres.nep import ResonanceOperator, solve_scattering, l2_error
from dtnres.oracle import disk_exact_poles, mie_scattered_field
from dtnres.sim import find_resonances, PoleList
from dtnres import report
from dtnres.utils import maybe_mkdir


log = logging.getLogger("dtnres")


class TqdmLoggingHandler(logging.Handler):
    def __init__(self, level=logging.NOTSET):
        super().__init__(level)

    def emit(self, record):
        try:
            msg = self.format(record)
            tqdm.write(msg, file=sys.stderr)
            self.flush()
        except (KeyboardInterrupt, SystemExit):
            raise
        except Exception:
            self.handleError(record)


def setup_logging(args) -> None:
    log.setLevel(logging.DEBUG)
    for handler in list(log.handlers):
        log.removeHandler(handler)

    if getattr(args, "log_file", None):
        fh = logging.FileHandler(args.log_file, mode='w')
        formatter = logging.Formatter("%(asctime)s: %(message)s")
        fh.setLevel(logging.DEBUG)
        fh.setFormatter(formatter)
        log.addHandler(fh)

    ch = TqdmLoggingHandler()
    formatter = logging.Formatter("%(message)s")
    ch.setFormatter(formatter)
    log.addHandler(ch)

    ch.setLevel(logging.CRITICAL)
    if args.verbose:
        ch.setLevel(logging.INFO)

    if args.very_verbose:
        ch.setLevel(logging.DEBUG)

    logging.captureWarnings(True)


def make_config(args) -> RunConfig:
    """ Defaults, then the config file, then the flags, then the environment. """
    config = RunConfig()
    if getattr(args, "config", None):
        RunConfig.load(args.config, config)

    config.update({key: getattr(args, key, None) for key in FILE_KEYS})
    config.apply_environment()
    config.check()
    return config


def cmd_solve(config: RunConfig, export_modes: bool = False, mesh: Optional[Mesh] = None) -> Tuple[PoleList, List[str]]:
    """ Resonances of the configured obstacle, written as CSV and JSON reports. """
    config.check()
    mesh = mesh or config.build_mesh()
    log.info("Mesh level %d: %d vertices, %d triangles, h=%.4g.",
             config.level, mesh.nb_vertices, mesh.nb_triangles, mesh.h)
    op = ResonanceOperator.from_mesh(mesh, config.R, config.N, solver=config.solver)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DtnresWarning)
        poles = find_resonances(op, config.region, config.sim)

    for warning in caught:
        log.warning(str(warning.message))

    maybe_mkdir(config.out_dir)
    paths = [report.write_poles_csv(poles, config.output_path(".csv")),
             report.write_json(report.pole_report(poles, config.to_dict()), config.output_path(".json"))]
    if export_modes:
        paths += report.export_eigenfunctions(mesh, poles, config.output_path(""))

    for pole in poles:
        log.info("k = %.10f %+.10fi (residual %.2e, group of %d)",
                 pole.eigenvalue.real, pole.eigenvalue.imag, pole.residual, pole.group_size)

    return poles, paths


def cmd_reference(region: Sequence[float], m_max: int, output: str) -> str:
    """ Exact disk resonances written as an oracle table. """
    poles = disk_exact_poles(region, m_max=m_max)
    for pole in poles:
        log.info("m=%d k = %.12f %+.12fi", pole.m, pole.k.real, pole.k.imag)

    return report.write_oracle_csv(poles, output)


def cmd_convergence(config: RunConfig, levels: Sequence[int], nb_tracks: int = 3,
                    output: Optional[str] = None) -> List[report.ConvergenceRow]:
    """ Solve at each level and tabulate the relative errors between consecutive levels. """
    if len(levels) < 2:
        raise ConfigError("Convergence needs at least two levels, got {}.".format(list(levels)))

    sizes, ndofs, poles_per_level = [], [], []
    for level in tqdm(levels, leave=False, desc="levels"):
        level_config = config.copy()
        level_config.level = level
        mesh = level_config.build_mesh()
        poles, _ = cmd_solve(level_config, mesh=mesh)
        sizes.append(mesh.h)
        ndofs.append(mesh.nb_vertices)
        poles_per_level.append([pole.eigenvalue for pole in poles])

    rows = report.convergence_table(levels, sizes, ndofs, poles_per_level, nb_tracks)
    output = output or config.output_path("-convergence.csv")
    report.write_convergence_csv(rows, output)
    for row in rows:
        log.info("level %d: errors %s orders %s", row.level, row.errors, row.orders)

    return rows


def cmd_scatter_check(k: float, levels: Sequence[int], R: float = 1.25, N: int = 20,
                      direction: Sequence[float] = (1., 0.), output: Optional[str] = None) -> List[report.ScatterRow]:
    """ Fixed-k plane wave scattering by the unit disk against the Mie series. """
    if not k > 0:
        raise ConfigError("The wavenumber must be positive, got {}.".format(k))

    disk = shapes.disk(1.)
    rows = []
    for level in tqdm(levels, leave=False, desc="levels"):
        mesh = build_mesh(disk, R, level)
        op = ResonanceOperator.from_mesh(mesh, R, N)
        u_h = solve_scattering(op, k, direction, mesh)
        u_ref = mie_scattered_field(k, direction, mesh.vertices)
        rows.append(report.ScatterRow(level, mesh.h, op.ndof, l2_error(mesh, op.S2, u_h, u_ref)))
        log.info("level %d: h=%.4g ndof=%d error=%.4e", level, mesh.h, op.ndof, rows[-1].l2_error)

    report.scatter_orders(rows)
    if output:
        report.write_scatter_csv(rows, output)

    return rows


def cmd_mesh(config: RunConfig, output: Optional[str] = None) -> str:
    config.check()
    mesh = config.build_mesh()
    maybe_mkdir(config.out_dir)
    return save_mesh(mesh, output or config.output_path(".mesh"))


def cmd_plot(computed: Sequence[str], output: str, reference: Optional[str] = None,
             region: Optional[Sequence[float]] = None, title: str = "") -> str:
    from dtnres.render import plot_poles, save_svg

    poles = [k for path in computed for k in report.read_eigenvalues(path)]
    exact = report.read_eigenvalues(reference) if reference else []
    return save_svg(plot_poles(poles, exact, region, title), output)


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("Run options (override the config file)")
    group.add_argument("--config", metavar="FILE", help="Flat `key = value` configuration file.")
    group.add_argument("--shape", help="disk, square, lshape or the path of a mesh file.")
    group.add_argument("-R", dest="R", type=float, help="Radius of the artificial boundary.")
    group.add_argument("-N", dest="N", type=int, help="Truncation order of the DtN map.")
    group.add_argument("--region", type=float, nargs=4, metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"),
                       help="Search rectangle in the fourth quadrant.")
    group.add_argument("--level", type=int, help="Mesh refinement level (>= 1).")
    group.add_argument("--n-quad", dest="n_quad", type=int, help="Contour quadrature nodes.")
    group.add_argument("--threshold", type=float, help="Indicator threshold.")
    group.add_argument("--min-cell", dest="min_cell", type=float, help="Half width of the candidate cells.")
    group.add_argument("--seed", type=int, help="Seed of the random right-hand side.")
    group.add_argument("--dedupe-radius", dest="dedupe_radius", type=float, help="Merge radius of duplicate poles.")
    group.add_argument("--residual-tol", dest="residual_tol", type=float, help="Largest accepted residual.")
    group.add_argument("--workers", type=int, help="Worker processes (also DTNRES_WORKERS).")
    group.add_argument("--solver", choices=["lowrank", "direct"], help="Resolvent strategy.")
    group.add_argument("--out-dir", dest="out_dir", help="Folder where the reports are written.")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dtn-res",
                                     description="Scattering resonances of sound-hard obstacles.")
    parser.add_argument("--version", action="version", version="%(prog)s {}".format(__version__))

    general = argparse.ArgumentParser(add_help=False)
    general.add_argument("-v", "--verbose", action="store_true", help="Enable verbose mode.")
    general.add_argument("-vv", "--very-verbose", action="store_true", help="Display debug information.")
    general.add_argument("--log-file", help="Verbose information will be written to this file.")

    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True

    solve = subparsers.add_parser("solve", parents=[general], help="Compute the resonances in a region.")
    _add_run_options(solve)
    solve.add_argument("--export-modes", action="store_true",
                       help="Also write the mesh and the eigenfunctions.")

    reference = subparsers.add_parser("reference", parents=[general], help="Exact resonances of the unit disk.")
    reference.add_argument("--region", type=float, nargs=4, default=[0., 4., -4., 0.],
                           metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"))
    reference.add_argument("--m-max", type=int, default=12, help="Highest angular order. Default: %(default)s")
    reference.add_argument("--output", default="disk_reference.csv", help="Default: %(default)s")

    convergence = subparsers.add_parser("convergence", parents=[general],
                                        help="Relative errors and orders over refinement levels.")
    _add_run_options(convergence)
    convergence.add_argument("--levels", type=int, nargs="+", default=[1, 2, 3],
                             help="Refinement levels. Default: %(default)s")
    convergence.add_argument("--tracks", type=int, default=3, help="Number of tracked poles. Default: %(default)s")
    convergence.add_argument("--output", help="CSV file. Default: <out-dir>/<uuid>-convergence.csv")

    scatter = subparsers.add_parser("scatter-check", parents=[general],
                                    help="Plane wave scattering by the unit disk against the Mie series.")
    scatter.add_argument("-k", type=float, default=1., help="Real wavenumber. Default: %(default)s")
    scatter.add_argument("--levels", type=int, nargs="+", default=[1, 2, 3, 4],
                         help="Refinement levels. Default: %(default)s")
    scatter.add_argument("-R", dest="R", type=float, default=1.25, help="Default: %(default)s")
    scatter.add_argument("-N", dest="N", type=int, default=20, help="Default: %(default)s")
    scatter.add_argument("--direction", type=float, nargs=2, default=[1., 0.], metavar=("DX", "DY"))
    scatter.add_argument("--output", default="scatter_check.csv", help="Default: %(default)s")

    mesh = subparsers.add_parser("mesh", parents=[general], help="Write the mesh of the configured geometry.")
    _add_run_options(mesh)
    mesh.add_argument("--output", help="Mesh file. Default: <out-dir>/<uuid>.mesh")

    plot = subparsers.add_parser("plot", parents=[general], help="SVG scatter plot of computed poles.")
    plot.add_argument("computed", nargs="*", help="Pole reports (CSV).")
    plot.add_argument("--reference", help="Oracle table (CSV).")
    plot.add_argument("--region", type=float, nargs=4, metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"))
    plot.add_argument("--title", default="")
    plot.add_argument("--output", default="poles.svg", help="Default: %(default)s")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.verbose = args.verbose or args.very_verbose
    setup_logging(args)

    try:
        if args.command == "solve":
            config = make_config(args)
            log.info(str(config))
            poles, paths = cmd_solve(config, export_modes=args.export_modes)
            print("{} poles found.".format(len(poles)))
            for path in paths:
                print(path)

        elif args.command == "reference":
            print(cmd_reference(args.region, args.m_max, args.output))

        elif args.command == "convergence":
            config = make_config(args)
            rows = cmd_convergence(config, args.levels, args.tracks, args.output)
            print("{} levels tabulated.".format(len(rows)))

        elif args.command == "scatter-check":
            rows = cmd_scatter_check(args.k, args.levels, args.R, args.N, args.direction, args.output)
            for row in rows:
                order = "" if row.order is None else "{:.3f}".format(row.order)
                print("{:2d} {:10.4g} {:8d} {:12.4e} {}".format(row.level, row.h, row.ndof, row.l2_error, order))

        elif args.command == "mesh":
            print(cmd_mesh(make_config(args), args.output))

        elif args.command == "plot":
            print(cmd_plot(args.computed, args.output, args.reference, args.region, args.title))

    except ConfigError as e:
        print("dtn-res: error: {}".format(e), file=sys.stderr)
        return 2
    except (DtnresError, OSError) as e:
        log.critical(str(e))
        print("dtn-res: {}".format(e), file=sys.stderr)
        return 1

    return 0


if __name__ == "__main__":
    sys.exit(main())
