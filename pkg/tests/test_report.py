"""Tests for report rendering and the acceptance checks."""

import logging

import numpy as np
import pytest

from geometry.boundary import NormalAudit
from harness.acceptance import (
    AUDIT_BAND,
    AUDIT_REFERENCE,
    POISSON_REFERENCE,
    STOKES_FITTED_REFERENCE,
    STOKES_REFERENCE,
    bands_for,
    check_audit,
    check_ladder,
)
from harness.ladder import ConvergenceRow, ProblemKind, compute_rates
from harness.report import (
    ReportError,
    ReportFormat,
    audit_table,
    convergence_table,
    emit_report,
    emit_table,
    format_error,
    format_rate,
    render_csv,
    render_markdown,
)
from mesh.grid import BoundingBox, build_background_grid


def _rows(reference, norms, violating=1, scale=1.0):
    rows = [
        ConvergenceRow(
            mesh_size=h,
            errors={n: scale * values[n] for n in norms},
            rates={},
            violating_count=violating,
            total_count=23,
        )
        for h, values in reference.items()
    ]
    return compute_rates(rows)


@pytest.fixture
def poisson_rows():
    return _rows(POISSON_REFERENCE, ["l2"])


class TestFormatting:
    """Tests for number formatting."""

    def test_format_error(self):
        """Errors use three significant digits."""
        assert format_error(5.1234e-3) == "5.12E-03"
        assert format_error(0.04) == "4.00E-02"

    def test_format_rate(self):
        """Missing rates render as a dash."""
        assert format_rate(None) == "-"
        assert format_rate(1.98765) == "1.99"


class TestConvergenceTable:
    """Tests for convergence_table and its renderers."""

    def test_single_variant(self, poisson_rows):
        """One (error, rate) pair per norm plus the audit columns."""
        table = convergence_table({"sbm": poisson_rows})
        assert table[0] == [
            "mesh_size",
            "l2",
            "l2_rate",
            "violating_edges",
            "surrogate_edges",
            "violating_pct",
        ]
        assert table[1] == ["4.00E-02", "5.12E-03", "-", "1", "23", "4.35"]
        assert table[2][2] == "2.00"

    def test_variants_prefixed(self, poisson_rows):
        """Several variants get prefixed column names."""
        table = convergence_table({"sbm": poisson_rows, "fitted": poisson_rows}, audit=False)
        assert table[0] == ["mesh_size", "sbm_l2", "sbm_l2_rate", "fitted_l2", "fitted_l2_rate"]

    def test_mismatched_sizes(self, poisson_rows):
        """Variants must share the mesh sizes."""
        with pytest.raises(ReportError, match="differing from 'sbm'"):
            convergence_table({"sbm": poisson_rows, "fitted": poisson_rows[:2]})

    def test_render_csv(self):
        """CSV rows end with a newline."""
        assert render_csv([["a", "b"], ["1", "2"]]) == "a,b\n1,2\n"

    def test_render_markdown(self):
        """Markdown tables have a right-aligned separator row."""
        text = render_markdown([["a", "b"], ["1", "2"]])
        assert text == "| a | b |\n|---:|---:|\n| 1 | 2 |\n"


class TestEmitReport:
    """Tests for emit_report and emit_table."""

    def test_csv(self, poisson_rows, tmp_path):
        """CSV output goes to <stem>.csv."""
        paths = emit_report(poisson_rows, ReportFormat.CSV, tmp_path, stem="poisson_trig")
        assert paths == [(tmp_path / "poisson_trig.csv").resolve()]
        assert paths[0].read_text().startswith("mesh_size,l2,l2_rate")

    def test_markdown_deterministic(self, poisson_rows, tmp_path):
        """The same rows give byte-identical files."""
        a = emit_report(poisson_rows, ReportFormat.MARKDOWN, tmp_path / "a")[0]
        b = emit_report(poisson_rows, ReportFormat.MARKDOWN, tmp_path / "b")[0]
        assert a.name == "convergence.md"
        assert a.read_bytes() == b.read_bytes()

    def test_empty(self, tmp_path):
        """Empty row lists are rejected."""
        with pytest.raises(ReportError, match="without rows"):
            emit_report([], ReportFormat.CSV, tmp_path)

    def test_vtk_needs_fields(self, poisson_rows, tmp_path):
        """VTK output needs rows run with fields kept."""
        with pytest.raises(ReportError, match="carries no fields"):
            emit_report(poisson_rows, ReportFormat.VTK, tmp_path)

    def test_vtk(self, tmp_path):
        """One VTK file per level and variant."""
        mesh = build_background_grid(BoundingBox(0.0, 0.0, 1.0, 0.2), n_long=1)
        row = ConvergenceRow(
            mesh_size=0.2,
            errors={"l2": 1.0},
            rates={},
            violating_count=0,
            total_count=4,
            surrogate=mesh,
            fields={"u": np.zeros(mesh.n_vertices)},
        )
        paths = emit_report([row, row], ReportFormat.VTK, tmp_path, stem="poisson_trig")
        assert [p.name for p in paths] == ["poisson_trig_sbm_level0.vtk", "poisson_trig_sbm_level1.vtk"]
        assert all(p.exists() for p in paths)

    def test_unsafe_stem(self, poisson_rows, tmp_path):
        """Unsafe names surface as ReportError."""
        with pytest.raises(ReportError, match="Cannot write report"):
            emit_report(poisson_rows, ReportFormat.CSV, tmp_path, stem="../escape")

    def test_table_rejects_vtk(self, tmp_path):
        """Plain tables cannot be written as VTK."""
        with pytest.raises(ReportError, match="does not apply to tables"):
            emit_table([["a"]], ReportFormat.VTK, tmp_path, "audit")


class TestAuditTable:
    """Tests for audit_table."""

    def test_rows(self):
        """Counts, percentage and the largest |d|/h_T are listed per level."""
        table = audit_table([(0.04, NormalAudit(1, 23, 0, 0.41234))])
        assert table[0][0] == "mesh_size"
        assert table[1] == ["4.00E-02", "1", "23", "4.35", "0", "0", "0.412"]


class TestCheckLadder:
    """Tests for check_ladder."""

    def test_reference_passes(self, poisson_rows):
        """The reference errors themselves pass every band."""
        assert check_ladder(poisson_rows, ProblemKind.POISSON) == []

    def test_stokes_reference_passes(self):
        """The Stokes reference rows pass their bands."""
        rows = _rows(STOKES_REFERENCE, ["strain", "velocity", "pressure"])
        assert check_ladder(rows, ProblemKind.STOKES) == []

    def test_error_breach(self, caplog):
        """Errors 20% above the reference are reported and logged."""
        rows = _rows(POISSON_REFERENCE, ["l2"], scale=1.2)
        with caplog.at_level(logging.ERROR, logger="harness.acceptance"):
            breaches = check_ladder(rows, ProblemKind.POISSON)
        assert len(breaches) == 4
        assert "l2 error" in breaches[0]
        assert "Acceptance breach" in caplog.text

    def test_rate_breach(self):
        """A rate outside its band is reported."""
        rows = compute_rates(
            [
                ConvergenceRow(0.04, {"l2": 5.12e-3}, {}, 1, 23),
                ConvergenceRow(0.02, {"l2": 2.56e-3}, {}, 1, 43),
            ]
        )
        breaches = check_ladder(rows, ProblemKind.POISSON)
        assert any("rate 1.00" in b for b in breaches)

    def test_no_violating_edge(self):
        """Each level must carry a violating edge."""
        rows = _rows(POISSON_REFERENCE, ["l2"], violating=0)
        breaches = check_ladder(rows, ProblemKind.POISSON)
        assert len(breaches) == 4
        assert all("no violating" in b for b in breaches)

    def test_parity(self, poisson_rows):
        """Fitted errors far from the shifted ones break parity and the fitted reference."""
        fitted = _rows(POISSON_REFERENCE, ["l2"], violating=0, scale=0.5)
        breaches = check_ladder(poisson_rows, ProblemKind.POISSON, fitted)
        assert any("fitted l2 error" in b for b in breaches)
        assert any("differ by more than 10%" in b for b in breaches)

    def test_stokes_fitted_parity(self):
        """Stokes parity covers strain and pressure; the velocity gap is allowed."""
        norms = ["strain", "velocity", "pressure"]
        rows = _rows(STOKES_REFERENCE, norms)
        fitted = _rows(STOKES_FITTED_REFERENCE, norms, violating=0)
        assert check_ladder(rows, ProblemKind.STOKES, fitted) == []
        assert bands_for(ProblemKind.STOKES).parity_norms == ("strain", "pressure")

    def test_stokes_fitted_breach(self):
        """Fitted Stokes errors away from their reference break parity."""
        norms = ["strain", "velocity", "pressure"]
        rows = _rows(STOKES_REFERENCE, norms)
        fitted = _rows(STOKES_FITTED_REFERENCE, norms, violating=0, scale=1.3)
        breaches = check_ladder(rows, ProblemKind.STOKES, fitted)
        assert any("fitted pressure error" in b for b in breaches)
        assert any("strain: shifted" in b for b in breaches)
        assert not any("velocity: shifted" in b for b in breaches)

    def test_unreferenced_sizes_skip_errors(self):
        """Sizes without a reference only have their rates checked."""
        rows = compute_rates(
            [
                ConvergenceRow(0.05, {"l2": 1.0}, {}, 1, 10),
                ConvergenceRow(0.025, {"l2": 0.25}, {}, 1, 20),
            ]
        )
        assert check_ladder(rows, ProblemKind.POISSON) == []

    def test_bands_for(self):
        """Poisson uses 5% error bands, Stokes 10%."""
        assert bands_for(ProblemKind.POISSON).error_tol == 0.05
        assert bands_for(ProblemKind.STOKES).error_tol == 0.10


class TestCheckAudit:
    """Tests for check_audit."""

    def test_positive_counts_pass(self):
        """Any positive count passes without exact matching."""
        assert check_audit([(0.04, NormalAudit(2, 23, 0, 0.3))]) == []

    def test_zero_count_fails(self):
        """A level without violations is a breach."""
        assert check_audit([(0.04, NormalAudit(0, 23, 0, 0.3))])

    def test_band(self):
        """A violating share outside the band is a breach even with a positive count."""
        audit = NormalAudit(4, 23, 0, 0.3)
        assert check_audit([(0.04, audit)], band=(2.0, 25.0)) == []
        breaches = check_audit([(0.04, audit)], band=AUDIT_BAND)
        assert breaches == ["h=4.00E-02 violating share 17.39% outside [2.0, 7.0]"]

    def test_exact_counts(self):
        """With exact matching the reference counts are required."""
        levels = [(h, NormalAudit(count, 100, 0, 0.3)) for h, (count, _) in AUDIT_REFERENCE.items()]
        assert check_audit(levels, exact_counts=True) == []
        breaches = check_audit([(0.04, NormalAudit(2, 23, 0, 0.3))], exact_counts=True)
        assert breaches == ["h=4.00E-02 has 2 violating edges, expected 1"]
