"""Tests for the property probes and the probe battery."""

import json
import math

import numpy as np
import pytest
import scipy.sparse as sp

from harness.benchmark import build_level, trapezoid_geometry
from harness.ladder import ProblemKind
from harness.manufactured import ScalarCase, poisson_affine, poisson_trig
from verify import (
    BatteryError,
    ProbeReport,
    ProbeSettings,
    consistency_problem,
    h1_gram,
    run_coercivity_probe,
    run_consistency_probe,
    run_patch_probe,
    run_symmetry_probe,
    run_trace_probe,
    smallest_generalized_eigenvalue,
    trace_ratio,
    write_summaries,
)

UNIT_TRIANGLE = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


@pytest.fixture
def fast_settings():
    return ProbeSettings(coercivity_iterations=200, trace_samples=200, test_functions=5)


class TestProbeReport:
    """Tests for ProbeReport."""

    def test_to_line(self):
        """Status, name, values and sorted context on one line."""
        report = ProbeReport("patch/poisson", True, 1.5e-12, 1e-9, {"seed": 42, "alpha": 10.0})
        assert report.to_line() == (
            "PASS patch/poisson measured=1.500000e-12 tolerance=1.000e-09 alpha=10.0 seed=42"
        )

    def test_to_dict(self):
        """Dictionaries carry every field."""
        report = ProbeReport("trace", False, 0.2, 0.1)
        assert report.to_dict() == {
            "name": "trace",
            "passed": False,
            "measured": 0.2,
            "tolerance": 0.1,
            "context": {},
        }
        assert report.to_line().startswith("FAIL trace")


class TestTraceRatio:
    """Tests for the closed-form trace ratio."""

    def test_constant_on_hypotenuse(self):
        """w = 1 on the unit right triangle's hypotenuse gives h_T |e| / |T| = 4."""
        ratio = trace_ratio(UNIT_TRIANGLE, 1, np.ones(3))
        assert ratio[0] == pytest.approx(4.0)

    def test_constant_on_leg(self):
        """On a unit leg the ratio is sqrt(2) * 1 / 0.5."""
        assert trace_ratio(UNIT_TRIANGLE, 0, np.ones(3))[0] == pytest.approx(2.0 * math.sqrt(2.0))

    def test_zero_function(self):
        """A zero function has no ratio."""
        ratio = trace_ratio(UNIT_TRIANGLE, 0, np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]))
        assert math.isnan(ratio[0])
        assert np.isfinite(ratio[1])

    def test_scale_invariant(self):
        """Scaling the cell leaves the ratio unchanged."""
        coeffs = np.random.default_rng(1).standard_normal((10, 3))
        assert trace_ratio(3.0 * UNIT_TRIANGLE, 2, coeffs) == pytest.approx(
            trace_ratio(UNIT_TRIANGLE, 2, coeffs)
        )


class TestGeneralizedEigenvalue:
    """Tests for h1_gram and smallest_generalized_eigenvalue."""

    def test_gram_constant(self):
        """The constant function has zero gradient, so its H1 norm squared is the area."""
        mesh = build_level(trapezoid_geometry(), 4e-2).surrogate
        gram = h1_gram(mesh)
        ones = np.ones(mesh.n_vertices)
        assert ones @ (gram @ ones) == pytest.approx(mesh.total_area)
        assert abs(gram - gram.T).max() < 1e-14

    def test_known_spectrum(self):
        """With an identity Gram matrix the smallest eigenvalue of a shifted Laplacian is exact."""
        n = 40
        laplacian = sp.diags([-np.ones(n - 1), 2.0 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1])
        matrix = (laplacian + 0.5 * sp.eye(n)).tocsr()
        expected = 0.5 + 2.0 - 2.0 * math.cos(math.pi / (n + 1))
        got = smallest_generalized_eigenvalue(
            matrix, sp.eye(n, format="csr"), np.random.default_rng(0), tol=1e-10
        )
        assert got == pytest.approx(expected, rel=1e-6)

    def test_skew_part_ignored(self):
        """Only the symmetric part of the form enters the eigenvalue."""
        n = 40
        laplacian = sp.diags([-np.ones(n - 1), 2.0 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1])
        skew = sp.diags([-np.ones(n - 1), np.ones(n - 1)], [-1, 1])
        gram = sp.eye(n, format="csr")
        rng = np.random.default_rng(0)
        plain = smallest_generalized_eigenvalue(laplacian.tocsr(), gram, rng, tol=1e-10)
        rng = np.random.default_rng(0)
        skewed = smallest_generalized_eigenvalue(
            (laplacian + 3.0 * skew).tocsr(), gram, rng, tol=1e-10
        )
        assert skewed == pytest.approx(plain, rel=1e-6)

    def test_indefinite_detected(self):
        """A negative shift drives the smallest eigenvalue below zero."""
        n = 40
        laplacian = sp.diags([-np.ones(n - 1), 2.0 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1])
        matrix = (laplacian - 0.1 * sp.eye(n)).tocsr()
        got = smallest_generalized_eigenvalue(
            matrix, sp.eye(n, format="csr"), np.random.default_rng(0), tol=1e-10
        )
        assert got < 0.0


class TestProbes:
    """Tests for the individual probes on the coarse benchmark level."""

    def test_coercivity_poisson(self, fast_settings):
        """The Poisson form is positive at alpha = 10."""
        reports = run_coercivity_probe(ProblemKind.POISSON, [10.0], [4e-2], fast_settings)
        assert len(reports) == 1
        assert reports[0].passed
        assert reports[0].name == "coercivity/poisson/alpha=10/h=4.00E-02"

    def test_coercivity_stokes(self, fast_settings):
        """The Stokes velocity block is positive at alpha = 2.5."""
        reports = run_coercivity_probe(ProblemKind.STOKES, [2.5], [4e-2], fast_settings)
        assert reports[0].passed
        assert reports[0].context["kind"] == "stokes"

    def test_trace_single_mesh(self, fast_settings):
        """A single mesh has zero variation."""
        mesh = build_level(trapezoid_geometry(), 4e-2).surrogate
        report = run_trace_probe(mesh, fast_settings)
        assert report.passed
        assert report.measured == 0.0
        assert report.name == "trace/levels=1"

    def test_trace_ladder(self, fast_settings):
        """Similar cells across levels keep the maximum ratio nearly constant."""
        geom = trapezoid_geometry()
        meshes = [build_level(geom, h).surrogate for h in (4e-2, 2e-2)]
        report = run_trace_probe(meshes, fast_settings)
        assert report.passed
        assert len(report.context["max_ratios"].split(",")) == 2

    @pytest.mark.parametrize(
        "case",
        [poisson_affine(), ScalarCase.from_expression("x**2", name="quadratic"), poisson_trig()],
        ids=["affine", "quadratic", "trig"],
    )
    def test_consistency(self, fast_settings, case):
        """The residual of the exact solution equals the shifted gap terms."""
        problem = consistency_problem(case, 4e-2, settings=fast_settings)
        report = run_consistency_probe(problem, case, fast_settings)
        assert report.passed, report.to_line()

    @pytest.mark.parametrize("kind", list(ProblemKind))
    def test_patch(self, fast_settings, kind):
        """Affine solutions are reproduced on the unfitted coarse level."""
        report = run_patch_probe(kind, 4e-2, fast_settings)
        assert report.passed, report.to_line()

    @pytest.mark.slow
    @pytest.mark.parametrize("mesh_size", [1e-2, 5e-3])
    @pytest.mark.parametrize("kind", list(ProblemKind))
    def test_patch_fine_levels(self, fast_settings, kind, mesh_size):
        """Affine solutions stay exact to the patch tolerance on refined levels."""
        report = run_patch_probe(kind, mesh_size, fast_settings)
        assert report.passed, report.to_line()

    def test_symmetry(self, fast_settings):
        """The fitted Poisson matrix is symmetric."""
        report = run_symmetry_probe(4e-2, fast_settings)
        assert report.passed, report.to_line()

    def test_seeded_determinism(self, fast_settings):
        """The same seed gives the same measurement."""
        a = run_coercivity_probe(ProblemKind.POISSON, [10.0], [4e-2], fast_settings)[0]
        b = run_coercivity_probe(ProblemKind.POISSON, [10.0], [4e-2], fast_settings)[0]
        assert a.measured == b.measured


class TestWriteSummaries:
    """Tests for write_summaries."""

    def test_files(self, tmp_path):
        """Text and JSON summaries list every probe."""
        reports = [ProbeReport("a", True, 1.0, 2.0), ProbeReport("b", False, 3.0, 2.0)]
        text, data = write_summaries(reports, tmp_path)
        assert text.read_text().splitlines()[1].startswith("FAIL b")
        payload = json.loads(data.read_text())
        assert payload["passed"] is False
        assert [p["name"] for p in payload["probes"]] == ["a", "b"]

    def test_unwritable(self, tmp_path):
        """Write failures surface as BatteryError."""
        blocker = tmp_path / "blocker"
        blocker.write_text("x")
        with pytest.raises(BatteryError, match="Cannot write probe summary"):
            write_summaries([ProbeReport("a", True, 1.0, 2.0)], blocker)
