"""Manufactured cases, benchmark levels, convergence ladders and reports."""

from harness.acceptance import check_audit, check_ladder
from harness.benchmark import BenchmarkLevel, build_level, trapezoid_geometry
from harness.ladder import (
    ConvergenceRow,
    LadderError,
    LadderParams,
    LadderRunner,
    ProblemKind,
    compute_rates,
    run_bodyfitted_comparison,
    run_ladder,
)
from harness.manufactured import FlowCase, ScalarCase
from harness.report import ReportError, ReportFormat, emit_report

__all__ = [
    "BenchmarkLevel",
    "ConvergenceRow",
    "FlowCase",
    "LadderError",
    "LadderParams",
    "LadderRunner",
    "ProblemKind",
    "ReportError",
    "ReportFormat",
    "ScalarCase",
    "build_level",
    "check_audit",
    "check_ladder",
    "compute_rates",
    "emit_report",
    "run_bodyfitted_comparison",
    "run_ladder",
    "trapezoid_geometry",
]
