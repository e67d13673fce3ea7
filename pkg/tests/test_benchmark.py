"""Full benchmark ladders on the trapezoid checked against the reference errors."""

import pytest

from harness.acceptance import check_audit, check_ladder
from harness.benchmark import build_level, trapezoid_geometry
from harness.ladder import ProblemKind, run_bodyfitted_comparison
from harness.manufactured import poisson_trig, stokes_trapezoid

LADDER = [4e-2, 2e-2, 1e-2, 5e-3]


@pytest.mark.slow
class TestBenchmarkLadders:
    """Shifted and body-fitted ladders within the acceptance bands."""

    def test_poisson(self):
        """Poisson L2 errors, rates and parity match the reference."""
        sbm, fitted = run_bodyfitted_comparison(poisson_trig(), ProblemKind.POISSON, LADDER)
        assert check_ladder(sbm, ProblemKind.POISSON, fitted) == []

    def test_stokes(self):
        """Stokes strain, velocity and pressure errors match the reference."""
        sbm, fitted = run_bodyfitted_comparison(stokes_trapezoid(), ProblemKind.STOKES, LADDER)
        assert check_ladder(sbm, ProblemKind.STOKES, fitted) == []


@pytest.mark.slow
class TestAudit:
    """Violating-edge shares of the wide aspect-5 grid family."""

    def test_shares(self):
        """Every level violates the resolution condition on a steady share of its edges."""
        geom = trapezoid_geometry()
        levels = [(h, build_level(geom, h).audit) for h in LADDER]
        assert check_audit(levels, band=(1.0, 30.0)) == []
        shares = [audit.percentage for _, audit in levels]
        assert max(shares) - min(shares) < 8.0
        for _, audit in levels:
            assert audit.orthogonal_count <= audit.violating_count
