"""Tests for the convergence-ladder driver."""

import logging
import math

import numpy as np
import pytest

import poisson.solve
from fem.solver import SolveMethod, SolverError
from harness.ladder import (
    ConvergenceRow,
    LadderError,
    LadderParams,
    LadderRunner,
    LevelStatus,
    ProblemKind,
    compute_rates,
    run_bodyfitted_comparison,
    run_ladder,
)
from harness.manufactured import poisson_affine, poisson_trig, stokes_trapezoid
from mesh.grid import Orientation
from stokes import PressureGauge


def _row(h, **errors):
    return ConvergenceRow(mesh_size=h, errors=errors, rates={}, violating_count=1, total_count=20)


class TestLadderParams:
    """Tests for LadderParams dataclass."""

    def test_defaults(self):
        """Default parameters match the benchmark setup."""
        params = LadderParams()
        assert params.alpha is None
        assert params.gamma == 1.0
        assert params.mu == 1.0
        assert params.aspect == 5.0
        assert params.orientation is Orientation.WIDE
        assert params.method is SolveMethod.DIRECT
        assert params.margin == 0.0
        assert params.gauge is PressureGauge.AUTO
        assert params.edge_points == 3
        assert params.keep_fields is False

    def test_resolved_alpha(self):
        """Unset alpha falls back to the per-problem default."""
        params = LadderParams()
        assert params.resolved_alpha(ProblemKind.POISSON) == 10.0
        assert params.resolved_alpha(ProblemKind.STOKES) == 2.5
        assert LadderParams(alpha=4.0).resolved_alpha(ProblemKind.STOKES) == 4.0


class TestConvergenceRow:
    """Tests for ConvergenceRow."""

    def test_percentage(self):
        """Percentage of violating edges."""
        assert _row(0.1, l2=1.0).percentage == pytest.approx(5.0)

    def test_percentage_no_edges(self):
        """Zero edges give zero percent."""
        row = ConvergenceRow(mesh_size=0.1, errors={}, rates={}, violating_count=0, total_count=0)
        assert row.percentage == 0.0


class TestComputeRates:
    """Tests for compute_rates."""

    def test_second_order(self):
        """Errors dropping by four per halving give rate two."""
        rows = compute_rates([_row(0.04, l2=4.0), _row(0.02, l2=1.0), _row(0.01, l2=0.25)])
        assert rows[0].rates["l2"] is None
        assert rows[1].rates["l2"] == pytest.approx(2.0)
        assert rows[2].rates["l2"] == pytest.approx(2.0)

    def test_scaling_invariant(self):
        """Scaling every mesh size leaves the rates unchanged."""
        base = compute_rates([_row(0.04, l2=3.0), _row(0.02, l2=1.1)])
        scaled = compute_rates([_row(4.0, l2=3.0), _row(2.0, l2=1.1)])
        assert scaled[1].rates["l2"] == pytest.approx(base[1].rates["l2"])

    def test_non_monotone_warns(self, caplog):
        """A growing error gives a negative rate and a warning."""
        with caplog.at_level(logging.WARNING, logger="harness.ladder"):
            rows = compute_rates([_row(0.04, l2=1.0), _row(0.02, l2=2.0)])
        assert rows[1].rates["l2"] == pytest.approx(-1.0)
        assert "Non-monotone l2" in caplog.text

    def test_zero_error(self):
        """A zero error has no rate."""
        rows = compute_rates([_row(0.04, l2=1.0), _row(0.02, l2=0.0)])
        assert rows[1].rates["l2"] is None


class TestLadderRunner:
    """Tests for LadderRunner."""

    def test_stokes_needs_flow_case(self):
        """A scalar case cannot drive a Stokes ladder."""
        with pytest.raises(LadderError, match="needs a flow case"):
            LadderRunner(poisson_trig(), ProblemKind.STOKES)

    def test_poisson_needs_scalar_case(self):
        """A flow case cannot drive a Poisson ladder."""
        with pytest.raises(LadderError, match="needs a scalar case"):
            LadderRunner(stokes_trapezoid(), ProblemKind.POISSON)

    def test_viscosity_mismatch(self):
        """The case viscosity must equal the ladder's mu."""
        with pytest.raises(LadderError, match="differs from mu"):
            LadderRunner(stokes_trapezoid(mu=2.0), ProblemKind.STOKES)

    def test_too_few_levels(self):
        """A single level has no rate."""
        with pytest.raises(LadderError, match="at least 2 levels"):
            run_ladder(poisson_trig(), ProblemKind.POISSON, [0.04])

    @pytest.mark.parametrize("sizes", [[0.02, 0.04], [0.04, 0.04], [0.04, -0.02]])
    def test_sizes_must_decrease(self, sizes):
        """Sizes must be positive and strictly decreasing."""
        with pytest.raises(LadderError, match="strictly decreasing"):
            run_ladder(poisson_trig(), ProblemKind.POISSON, sizes)

    def test_poisson_ladder(self):
        """Two Poisson levels converge at roughly second order in L2."""
        runner = LadderRunner(poisson_trig(), ProblemKind.POISSON)
        rows = runner.run([0.04, 0.02])
        assert [s.status for s in runner.levels] == [LevelStatus.DONE, LevelStatus.DONE]
        assert all(s.elapsed >= 0.0 for s in runner.levels)
        assert [r.mesh_size for r in rows] == [0.04, 0.02]
        assert rows[0].rates == {"l2": None, "h1": None}
        assert 1.6 < rows[1].rates["l2"] < 2.4
        assert 0.7 < rows[1].rates["h1"] < 1.4
        assert all(r.variant == "sbm" for r in rows)
        assert all(r.total_count > 0 for r in rows)
        assert rows[0].surrogate is None and rows[0].fields == {}

    def test_keep_fields(self):
        """Kept fields hold nodal solution and exact values on the surrogate."""
        params = LadderParams(keep_fields=True)
        rows = run_ladder(poisson_affine(), ProblemKind.POISSON, [0.04, 0.02], params)
        row = rows[0]
        assert row.surrogate is not None
        assert row.fields["u"].shape == (row.surrogate.n_vertices,)
        assert np.abs(row.fields["u"] - row.fields["u_exact"]).max() < 1e-9

    def test_stokes_ladder(self):
        """The Stokes ladder reports strain, velocity and pressure errors."""
        rows = run_ladder(stokes_trapezoid(), ProblemKind.STOKES, [0.04, 0.02])
        assert set(rows[1].errors) == {"strain", "velocity", "pressure"}
        assert rows[1].errors["velocity"] < rows[0].errors["velocity"]
        assert rows[1].rates["velocity"] > 1.5

    def test_failure_keeps_partial_rows(self, monkeypatch):
        """A failing second level raises with the first row attached."""
        real = poisson.solve.solve
        calls = {"n": 0}

        def flaky(system, method):
            calls["n"] += 1
            if calls["n"] == 2:
                raise SolverError("boom")
            return real(system, method)

        monkeypatch.setattr(poisson.solve, "solve", flaky)
        runner = LadderRunner(poisson_trig(), ProblemKind.POISSON)
        with pytest.raises(LadderError, match="h=2.00e-02 failed") as excinfo:
            runner.run([0.04, 0.02])
        assert len(excinfo.value.rows) == 1
        assert excinfo.value.rows[0].mesh_size == 0.04
        states = runner.levels
        assert states[0].status is LevelStatus.DONE
        assert states[1].status is LevelStatus.FAILED
        assert "boom" in states[1].last_error


class TestBodyFittedComparison:
    """Tests for run_bodyfitted_comparison."""

    def test_matched_levels(self):
        """Both variants run on the same sizes; the fitted one has no violations."""
        sbm, fitted = run_bodyfitted_comparison(poisson_trig(), ProblemKind.POISSON, [0.04, 0.02])
        assert [r.mesh_size for r in sbm] == [r.mesh_size for r in fitted]
        assert all(r.variant == "fitted" for r in fitted)
        assert all(r.violating_count == 0 for r in fitted)
        assert [r.total_count for r in sbm] == [r.total_count for r in fitted]
        for a, b in zip(sbm, fitted, strict=True):
            assert math.isclose(a.errors["l2"], b.errors["l2"], rel_tol=0.5)

    def test_affine_both_exact(self):
        """An affine solution is exact in both columns."""
        sbm, fitted = run_bodyfitted_comparison(poisson_affine(), ProblemKind.POISSON, [0.04, 0.02])
        for row in sbm + fitted:
            assert row.errors["l2"] < 1e-10
