"""Run every probe with one seed and write the text and JSON summaries."""

import json
import logging
from pathlib import Path

from common.paths import PathError, resolve_output_path
from harness.benchmark import build_level, trapezoid_geometry
from harness.ladder import ProblemKind
from harness.manufactured import ScalarCase, poisson_affine, poisson_trig
from verify.probes import (
    consistency_problem,
    run_coercivity_probe,
    run_consistency_probe,
    run_patch_probe,
    run_symmetry_probe,
    run_trace_probe,
)
from verify.report import ProbeReport, ProbeSettings

logger = logging.getLogger(__name__)

TEXT_SUMMARY = "probes.txt"
JSON_SUMMARY = "probes.json"


class BatteryError(Exception):
    """Raised when the probe summaries cannot be written."""

    pass


def collect_probes(settings: ProbeSettings | None = None) -> list[ProbeReport]:
    """
    Run the full battery and return the reports sorted by name.

    Covers coercivity (Poisson and Stokes velocity block), the discrete trace
    ratio over the mesh ladder, the consistency identity for affine, quadratic
    and trigonometric u, patch tests for both problems on every level, and
    fitted symmetry.
    """
    settings = settings or ProbeSettings()
    sizes = settings.mesh_sizes
    coarse = sizes[0]
    reports: list[ProbeReport] = []

    reports += run_coercivity_probe(ProblemKind.POISSON, settings.poisson_alphas, sizes, settings)
    reports += run_coercivity_probe(ProblemKind.STOKES, settings.stokes_alphas, sizes, settings)

    geom = trapezoid_geometry()
    reports.append(run_trace_probe([build_level(geom, h).surrogate for h in sizes], settings))

    cases = [poisson_affine(), ScalarCase.from_expression("x**2", name="quadratic"), poisson_trig()]
    for case in cases:
        problem = consistency_problem(case, coarse, settings=settings)
        reports.append(
            run_consistency_probe(problem, case, settings, name=f"consistency/{case.name}")
        )

    for h in sizes:
        reports.append(run_patch_probe(ProblemKind.POISSON, h, settings))
        reports.append(run_patch_probe(ProblemKind.STOKES, h, settings))
    reports.append(run_symmetry_probe(coarse, settings))
    return sorted(reports, key=lambda r: r.name)


def write_summaries(reports: list[ProbeReport], out_dir: str | Path) -> list[Path]:
    """Write ``probes.txt`` (one line per probe) and ``probes.json``."""
    text = "".join(r.to_line() + "\n" for r in reports)
    payload = {
        "passed": all(r.passed for r in reports),
        "probes": [r.to_dict() for r in reports],
    }
    paths = []
    try:
        for name, content in (
            (TEXT_SUMMARY, text),
            (JSON_SUMMARY, json.dumps(payload, indent=2, sort_keys=True) + "\n"),
        ):
            path = resolve_output_path(out_dir, name)
            path.write_text(content)
            paths.append(path)
    except (PathError, OSError) as e:
        raise BatteryError(f"Cannot write probe summary: {e}") from e
    return paths


def run_battery(
    settings: ProbeSettings | None = None, out_dir: str | Path | None = None
) -> list[ProbeReport]:
    """
    Run every probe and optionally write the summaries to ``out_dir``.

    Returns:
        Reports sorted by name; failures are reported, never raised.
    """
    settings = settings or ProbeSettings()
    logger.info(f"Running probe battery with seed {settings.seed}")
    reports = collect_probes(settings)
    failed = [r.name for r in reports if not r.passed]
    if failed:
        logger.warning(f"{len(failed)} of {len(reports)} probes failed: {', '.join(failed)}")
    else:
        logger.info(f"All {len(reports)} probes passed")
    if out_dir is not None:
        write_summaries(reports, out_dir)
    return reports
