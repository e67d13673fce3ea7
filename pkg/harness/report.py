"""Convergence and audit tables as CSV or markdown, and level fields as VTK."""

import csv
import io
import logging
from enum import Enum
from pathlib import Path

from common.paths import PathError, resolve_output_path
from geometry.boundary import NormalAudit
from harness.ladder import ConvergenceRow
from mesh.io import write_vtk

logger = logging.getLogger(__name__)

MISSING = "-"


class ReportError(Exception):
    """Raised when a report cannot be produced or written."""

    pass


class ReportFormat(Enum):
    """Output format of :func:`emit_report`."""

    CSV = "csv"
    MARKDOWN = "markdown"
    VTK = "vtk-fields"


def format_error(value: float) -> str:
    """Three significant digits in scientific notation, e.g. 5.12E-03."""
    return f"{value:.2E}"


def format_rate(value: float | None) -> str:
    return MISSING if value is None else f"{value:.2f}"


def convergence_table(
    columns: dict[str, list[ConvergenceRow]], audit: bool = True
) -> list[list[str]]:
    """
    Build a table with one block of (error, rate) columns per norm and variant.

    Args:
        columns: Variant label -> rows; all lists must share the mesh sizes.
        audit: Append the violating-edge count and percentage of the first variant.

    Returns:
        Header row followed by one row per level.
    """
    labels = list(columns)
    first = columns[labels[0]]
    for label in labels[1:]:
        sizes = [r.mesh_size for r in columns[label]]
        if sizes != [r.mesh_size for r in first]:
            raise ReportError(
                f"Variant '{label}' has mesh sizes {sizes} differing from '{labels[0]}'"
            )

    norms = list(first[0].errors)
    single = len(labels) == 1
    header = ["mesh_size"]
    for label in labels:
        for norm in norms:
            name = norm if single else f"{label}_{norm}"
            header += [name, f"{name}_rate"]
    if audit:
        header += ["violating_edges", "surrogate_edges", "violating_pct"]

    table = [header]
    for k, row in enumerate(first):
        line = [format_error(row.mesh_size)]
        for label in labels:
            level = columns[label][k]
            for norm in norms:
                line += [format_error(level.errors[norm]), format_rate(level.rates.get(norm))]
        if audit:
            line += [str(row.violating_count), str(row.total_count), f"{row.percentage:.2f}"]
        table.append(line)
    return table


def audit_table(levels: list[tuple[float, NormalAudit]]) -> list[list[str]]:
    """One row per (mesh size, audit) level, with the true-normal count and max |d|/h_T."""
    table = [
        [
            "mesh_size",
            "violating_edges",
            "surrogate_edges",
            "violating_pct",
            "orthogonal_edges",
            "misaligned_edges",
            "max_d_over_h",
        ]
    ]
    for mesh_size, audit in levels:
        table.append(
            [
                format_error(mesh_size),
                str(audit.violating_count),
                str(audit.total_count),
                f"{audit.percentage:.2f}",
                str(audit.orthogonal_count),
                str(audit.misaligned_count),
                f"{audit.max_d_over_h:.3f}",
            ]
        )
    return table


def render_csv(table: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(table)
    return buf.getvalue()


def render_markdown(table: list[list[str]]) -> str:
    """Pipes-and-dashes table with right-aligned columns."""
    header, *body = table
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---:" for _ in header) + "|"]
    lines += ["| " + " | ".join(line) + " |" for line in body]
    return "\n".join(lines) + "\n"


def _write(out_dir: str | Path, filename: str, text: str) -> Path:
    try:
        path = resolve_output_path(out_dir, filename)
        path.write_text(text)
    except (PathError, OSError) as e:
        raise ReportError(f"Cannot write report '{filename}': {e}") from e
    logger.info(f"Wrote {path}")
    return path


def emit_table(
    table: list[list[str]], fmt: ReportFormat, out_dir: str | Path, stem: str
) -> Path:
    """Write a prepared table as ``<stem>.csv`` or ``<stem>.md``."""
    if fmt is ReportFormat.CSV:
        return _write(out_dir, f"{stem}.csv", render_csv(table))
    if fmt is ReportFormat.MARKDOWN:
        return _write(out_dir, f"{stem}.md", render_markdown(table))
    raise ReportError(f"Format '{fmt.value}' does not apply to tables")


def emit_report(
    rows: list[ConvergenceRow] | dict[str, list[ConvergenceRow]],
    fmt: ReportFormat,
    out_dir: str | Path,
    stem: str = "convergence",
) -> list[Path]:
    """
    Write a convergence report.

    Output is a pure function of the rows, so identical runs give identical
    files. CSV and markdown produce one table; ``vtk-fields`` writes one VTK
    file per level from the fields kept on the rows.

    Args:
        rows: Rows of one variant, or variant label -> rows for side-by-side columns.
        fmt: Output format.
        out_dir: Target directory, created if missing.
        stem: File name stem.

    Returns:
        The written paths.

    Raises:
        ReportError: If there are no rows, fields are missing for ``vtk-fields``,
            or a file cannot be written.
    """
    columns = rows if isinstance(rows, dict) else {"sbm": rows}
    if not columns or any(not r for r in columns.values()):
        raise ReportError("Cannot emit a report without rows")

    if fmt is not ReportFormat.VTK:
        return [emit_table(convergence_table(columns), fmt, out_dir, stem)]

    paths = []
    for label, variant_rows in columns.items():
        for k, row in enumerate(variant_rows):
            if row.surrogate is None or not row.fields:
                raise ReportError(
                    f"Level h={row.mesh_size:.2e} carries no fields; run with fields kept"
                )
            filename = f"{stem}_{label}_level{k}.vtk"
            try:
                path = resolve_output_path(out_dir, filename)
                write_vtk(row.surrogate, path, point_data=row.fields)
            except (PathError, OSError) as e:
                raise ReportError(f"Cannot write '{filename}': {e}") from e
            paths.append(path)
    logger.info(f"Wrote {len(paths)} VTK field files to {out_dir}")
    return paths
