"""Command-line entry point: ``sbm run``, ``sbm audit`` and ``sbm verify``."""

import argparse
import logging
import sys

from common import settings
from common.paths import PathError
from fem.solver import SolveMethod, SolverError
from geometry.domain import DomainGeometry, GeometryError
from harness.acceptance import AUDIT_BAND, check_audit, check_ladder
from harness.benchmark import (
    DEFAULT_ASPECT,
    DEFAULT_MARGIN,
    REFERENCE_LEVELS,
    build_level,
    trapezoid_geometry,
)
from harness.ladder import (
    LadderError,
    LadderParams,
    LadderRunner,
    ProblemKind,
)
from harness.manufactured import POISSON_CASES, STOKES_CASES, ScalarCase
from harness.report import ReportError, ReportFormat, audit_table, emit_report, emit_table
from mesh.grid import MeshError, Orientation
from poisson import PoissonError
from stokes import PressureGauge, StokesError
from verify import BatteryError, ProbeSettings, run_battery

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_BREACH = 1
EXIT_ERROR = 2

DEFAULT_LEVELS = "4e-2,2e-2,1e-2,5e-3"

HANDLED = (
    BatteryError,
    GeometryError,
    LadderError,
    MeshError,
    OSError,
    PathError,
    PoissonError,
    ReportError,
    SolverError,
    StokesError,
    ValueError,
)


def parse_levels(text: str) -> list[float]:
    """Comma-separated mesh sizes, e.g. ``4e-2,2e-2``."""
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid mesh sizes '{text}'") from e


def _load_geometry(source: str, kind: ProblemKind) -> DomainGeometry:
    if source == "trapezoid":
        return trapezoid_geometry(neumann_left=kind is ProblemKind.STOKES)
    return DomainGeometry.from_file(source)


def _case(args: argparse.Namespace, kind: ProblemKind):
    if kind is ProblemKind.POISSON:
        if args.expression:
            return ScalarCase.from_expression(args.expression)
        name = args.case or "trig"
        if name not in POISSON_CASES:
            raise ValueError(f"Unknown Poisson case '{name}' (choose from {sorted(POISSON_CASES)})")
        return POISSON_CASES[name]()
    name = args.case or "trapezoid"
    if name not in STOKES_CASES:
        raise ValueError(f"Unknown Stokes case '{name}' (choose from {sorted(STOKES_CASES)})")
    return STOKES_CASES[name](args.mu)


def _add_grid_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--geometry",
        default="trapezoid",
        help="'trapezoid' or a polygon file with 'x y tag' rows (default: trapezoid)",
    )
    parser.add_argument("--levels", type=parse_levels, default=None, help="Mesh sizes, comma-separated")
    parser.add_argument("--aspect", type=float, default=DEFAULT_ASPECT, help="Rectangle aspect ratio")
    parser.add_argument(
        "--orientation",
        choices=[o.value for o in Orientation],
        default=Orientation.WIDE.value,
        help="Long side of the background rectangles (default: wide)",
    )
    parser.add_argument(
        "--margin",
        type=float,
        default=DEFAULT_MARGIN,
        help="Extra bbox width right of the domain (default: 0)",
    )
    parser.add_argument("--out", default=None, help="Output directory (default: $SBM_OUTPUT_DIR or results)")
    parser.add_argument(
        "--format",
        choices=[f.value for f in ReportFormat],
        default=ReportFormat.CSV.value,
        help="Report format (default: csv)",
    )
    parser.add_argument("--check", action="store_true", help="Exit 1 on an acceptance breach")
    parser.add_argument("--log-level", default=None, help="Logging level (default: $SBM_LOG_LEVEL or INFO)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sbm", description="Shifted Boundary Method convergence studies in 2D"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run a convergence ladder")
    run.add_argument("--problem", choices=[k.value for k in ProblemKind], default="poisson")
    run.add_argument("--case", default=None, help="Manufactured case name")
    run.add_argument("--expression", default=None, help="Custom Poisson solution u(x, y)")
    run.add_argument("--alpha", type=float, default=None, help="Nitsche penalty (10 Poisson, 2.5 Stokes)")
    run.add_argument("--gamma", type=float, default=1.0, help="Pressure stabilization")
    run.add_argument("--mu", type=float, default=1.0, help="Viscosity")
    run.add_argument("--method", choices=[m.value for m in SolveMethod], default="direct")
    run.add_argument("--gauge", choices=[g.value for g in PressureGauge], default="auto")
    run.add_argument("--edge-points", type=int, default=3, help="Gauss points per surrogate edge")
    run.add_argument("--compare", action="store_true", help="Add the body-fitted columns")
    _add_grid_options(run)

    audit = sub.add_parser("audit", help="Count surrogate edges violating nu . n > 0")
    audit.add_argument(
        "--match-counts", action="store_true", help="With --check, also require the reference counts"
    )
    audit.add_argument(
        "--band",
        action="store_true",
        help="With --check, also require the reference percentage band",
    )
    _add_grid_options(audit)

    verify = sub.add_parser("verify", help="Run the property probe battery")
    verify.add_argument("--seed", type=int, default=None, help="Seed (default: $SBM_SEED or 42)")
    verify.add_argument("--levels", type=parse_levels, default=None, help="Mesh sizes for the probes")
    verify.add_argument("--out", default=None, help="Output directory")
    verify.add_argument("--check", action="store_true", help="Exit 1 when a probe fails")
    verify.add_argument("--log-level", default=None, help="Logging level")
    return parser


def _run(args: argparse.Namespace) -> int:
    kind = ProblemKind(args.problem)
    case = _case(args, kind)
    fmt = ReportFormat(args.format)
    params = LadderParams(
        alpha=args.alpha,
        gamma=args.gamma,
        mu=args.mu,
        aspect=args.aspect,
        orientation=Orientation(args.orientation),
        method=SolveMethod(args.method),
        margin=args.margin,
        gauge=PressureGauge(args.gauge),
        edge_points=args.edge_points,
        keep_fields=fmt is ReportFormat.VTK,
    )
    levels = args.levels or parse_levels(DEFAULT_LEVELS)
    runner = LadderRunner(case, kind, params, _load_geometry(args.geometry, kind))
    rows = runner.run(levels)
    fitted = runner.run(levels, fitted=True) if args.compare else None

    columns = {"sbm": rows, "fitted": fitted} if fitted else rows
    out = settings.output_dir(args.out)
    for path in emit_report(columns, fmt, out, stem=f"{kind.value}_{case.name}"):
        print(path)

    if args.check and check_ladder(rows, kind, fitted):
        return EXIT_BREACH
    return EXIT_OK


def _audit(args: argparse.Namespace) -> int:
    geom = _load_geometry(args.geometry, ProblemKind.POISSON)
    levels = []
    for h in args.levels or REFERENCE_LEVELS:
        level = build_level(geom, h, args.aspect, Orientation(args.orientation), args.margin)
        levels.append((h, level.audit))
    fmt = ReportFormat(args.format)
    if fmt is ReportFormat.VTK:
        raise ReportError("The audit report is a table; use csv or markdown")
    print(emit_table(audit_table(levels), fmt, settings.output_dir(args.out), "audit"))
    band = AUDIT_BAND if args.band else None
    if args.check and check_audit(levels, exact_counts=args.match_counts, band=band):
        return EXIT_BREACH
    return EXIT_OK


def _verify(args: argparse.Namespace) -> int:
    probe_settings = ProbeSettings(seed=settings.seed(args.seed))
    if args.levels:
        probe_settings.mesh_sizes = tuple(args.levels)
    reports = run_battery(probe_settings, settings.output_dir(args.out))
    for report in reports:
        print(report.to_line())
    if args.check and not all(r.passed for r in reports):
        return EXIT_BREACH
    return EXIT_OK


COMMANDS = {"run": _run, "audit": _audit, "verify": _verify}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=settings.log_level(args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except HANDLED as e:
        logger.error(f"sbm {args.command} failed: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
