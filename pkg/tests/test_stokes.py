"""Tests for the stabilized shifted-boundary Stokes discretization."""

import numpy as np
import pytest

from fem.solver import SolveMethod
from geometry.boundary import build_edge_data, surrogate_geometry
from geometry.domain import BoundaryTag, DomainGeometry
from harness.benchmark import build_level, trapezoid_geometry
from harness.manufactured import stokes_affine, stokes_trapezoid
from stokes import (
    PressureGauge,
    StokesError,
    StokesProblem,
    assemble_stokes,
    pressure_mass,
    solve_stokes,
    stokes_dofmap,
    stokes_error_norms,
)
from stokes.assembly import PRESSURE


@pytest.fixture(scope="module")
def mixed_level():
    """Trapezoid with a Neumann left leg."""
    return build_level(trapezoid_geometry(neumann_left=True), 4e-2)


@pytest.fixture(scope="module")
def dirichlet_level():
    return build_level(trapezoid_geometry(), 4e-2)


def _problem(level, case, **kwargs):
    kwargs.setdefault("mu", case.mu)
    return StokesProblem(
        level.surrogate,
        level.edge_data,
        case.forcing,
        case.dirichlet,
        traction=case.traction,
        **kwargs,
    )


def _interpolant(level, case):
    points = level.surrogate.vertices
    return case.velocity(points), case.pressure(points)


class TestStokesProblem:
    """Tests for StokesProblem validation and gauge resolution."""

    @pytest.mark.parametrize("name", ["mu", "alpha", "gamma"])
    def test_nonpositive_parameters(self, mixed_level, name):
        """Viscosity, penalty and stabilization must be positive."""
        with pytest.raises(StokesError, match=f"{name} must be positive"):
            _problem(mixed_level, stokes_affine(), **{name: -1.0})

    def test_no_edges(self, mixed_level):
        """A problem without boundary edges is rejected."""
        case = stokes_affine()
        with pytest.raises(StokesError, match="needs surrogate boundary edges"):
            StokesProblem(mixed_level.surrogate, [], case.forcing, case.dirichlet)

    def test_zero_mean_with_neumann(self, mixed_level):
        """Neumann edges already fix the pressure."""
        with pytest.raises(StokesError, match="Zero-mean pressure gauge requested"):
            _problem(mixed_level, stokes_affine(), gauge=PressureGauge.ZERO_MEAN)

    def test_neumann_gauge_without_neumann(self, dirichlet_level):
        """The Neumann gauge needs at least one Neumann edge."""
        with pytest.raises(StokesError, match="Neumann gauge requested"):
            _problem(dirichlet_level, stokes_affine(), gauge=PressureGauge.NEUMANN)

    def test_missing_traction(self, mixed_level):
        """Neumann edges need a traction."""
        case = stokes_affine()
        with pytest.raises(StokesError, match="no traction given"):
            StokesProblem(mixed_level.surrogate, mixed_level.edge_data, case.forcing, case.dirichlet)

    def test_shifted_neumann_rejected(self):
        """Traction on the slanted leg would need a shift and is rejected."""
        geom = DomainGeometry.trapezoid()
        tags = [BoundaryTag.DIRICHLET, BoundaryTag.NEUMANN, BoundaryTag.DIRICHLET, BoundaryTag.DIRICHLET]
        slanted = DomainGeometry.from_vertices(geom.vertices, tags)
        level = build_level(slanted, 4e-2)
        with pytest.raises(StokesError, match="must lie on the true boundary"):
            _problem(level, stokes_affine())

    def test_auto_gauge(self, mixed_level, dirichlet_level):
        """AUTO picks zero mean exactly when every edge is Dirichlet."""
        case = stokes_affine()
        assert not _problem(mixed_level, case).zero_mean
        assert _problem(dirichlet_level, case).zero_mean
        problem = _problem(mixed_level, case)
        assert len(problem.dirichlet_edges) + len(problem.neumann_edges) == len(
            mixed_level.edge_data
        )
        assert problem.neumann_edges


class TestAssembleStokes:
    """Tests for assemble_stokes and its helpers."""

    def test_dofmap_multiplier(self, mixed_level, dirichlet_level):
        """The zero-mean gauge appends one multiplier dof."""
        case = stokes_affine()
        n = mixed_level.surrogate.n_vertices
        assert stokes_dofmap(_problem(mixed_level, case)).n_dofs == 3 * n
        m = dirichlet_level.surrogate.n_vertices
        dofmap = stokes_dofmap(_problem(dirichlet_level, case))
        assert dofmap.n_dofs == 3 * m + 1
        assert dofmap.multiplier_dof == 3 * m

    def test_pressure_mass_sums_to_area(self, mixed_level):
        """The basis functions partition unity, so their integrals sum to the area."""
        mass = pressure_mass(_problem(mixed_level, stokes_affine()))
        assert mass.sum() == pytest.approx(mixed_level.surrogate.total_area)
        assert (mass > 0).all()

    def test_info(self, mixed_level):
        """Parameters are recorded on the system."""
        system = assemble_stokes(_problem(mixed_level, stokes_trapezoid()))
        assert system.info["alpha"] == 2.5
        assert system.info["zero_mean"] is False
        n = 3 * mixed_level.surrogate.n_vertices
        assert system.shape == (n, n)

    def test_fitted_coupling_antisymmetric(self, mixed_level):
        """With d = 0 the velocity-pressure blocks are negative transposes."""
        geom = surrogate_geometry(mixed_level.surrogate, mixed_level.edge_data)
        fitted = build_edge_data(geom, mixed_level.surrogate, metrics=mixed_level.metrics)
        case = stokes_trapezoid()
        problem = StokesProblem(
            mixed_level.surrogate, fitted, case.forcing, case.dirichlet, traction=case.traction
        )
        system = assemble_stokes(problem)
        dofmap = system.dofmap
        vertices = np.arange(mixed_level.surrogate.n_vertices)
        u_dofs = np.concatenate([dofmap.index(vertices, 0), dofmap.index(vertices, 1)])
        p_dofs = dofmap.index(vertices, PRESSURE)
        matrix = system.matrix.tocsr()
        up = matrix[u_dofs][:, p_dofs].toarray()
        pu = matrix[p_dofs][:, u_dofs].toarray()
        uu = matrix[u_dofs][:, u_dofs].toarray()
        assert np.abs(up + pu.T).max() < 1e-12
        assert np.abs(uu - uu.T).max() < 1e-12 * np.abs(uu).max()

    def test_unfitted_not_symmetric(self, mixed_level):
        """Shifted edges break the symmetry of the velocity block."""
        system = assemble_stokes(_problem(mixed_level, stokes_trapezoid()))
        assert system.asymmetry() > 1e-8


class TestSolveStokes:
    """Tests for solve_stokes and stokes_error_norms."""

    @pytest.mark.parametrize("method", list(SolveMethod))
    def test_patch_neumann(self, mixed_level, method):
        """u = (x, -y), p = 1 is reproduced with a traction on the left leg."""
        case = stokes_affine()
        solution = solve_stokes(_problem(mixed_level, case), method)
        velocity, pressure = _interpolant(mixed_level, case)
        assert not solution.zero_mean
        assert np.abs(solution.velocity - velocity).max() < 1e-9
        assert np.abs(solution.pressure - pressure).max() < 1e-9

    def test_patch_zero_mean(self, dirichlet_level):
        """All-Dirichlet boundaries give the exact velocity and a zero-mean pressure."""
        case = stokes_affine()
        problem = _problem(dirichlet_level, case)
        solution = solve_stokes(problem)
        velocity, _ = _interpolant(dirichlet_level, case)
        assert solution.zero_mean
        assert np.abs(solution.velocity - velocity).max() < 1e-9
        assert abs(pressure_mass(problem) @ solution.pressure) < 1e-10
        assert np.ptp(solution.pressure) < 1e-9

    def test_residual_small(self, mixed_level):
        """The direct solve leaves a tiny relative residual."""
        solution = solve_stokes(_problem(mixed_level, stokes_trapezoid()))
        assert solution.residual < 1e-10

    def test_errors_reasonable(self, mixed_level):
        """Errors on the coarse level are small and ordered as expected."""
        case = stokes_trapezoid()
        solution = solve_stokes(_problem(mixed_level, case))
        errors = stokes_error_norms(
            mixed_level.surrogate, solution.velocity, solution.pressure, case
        )
        assert errors.velocity_l2 < 2e-3
        assert errors.velocity_l2 < errors.strain_l2 < 3e-2
        assert errors.pressure_l2 < 2e-2

    def test_error_norms_of_interpolant(self, mixed_level):
        """The interpolant of the affine flow has zero error."""
        case = stokes_affine()
        velocity, pressure = _interpolant(mixed_level, case)
        errors = stokes_error_norms(mixed_level.surrogate, velocity, pressure, case)
        assert errors.velocity_l2 < 1e-13
        assert errors.strain_l2 < 1e-12
        assert errors.pressure_l2 < 1e-13

    def test_zero_mean_ignores_constant(self, mixed_level):
        """A constant pressure shift does not change the zero-mean error."""
        case = stokes_trapezoid()
        velocity, pressure = _interpolant(mixed_level, case)
        mesh = mixed_level.surrogate
        base = stokes_error_norms(mesh, velocity, pressure, case, zero_mean=True)
        shifted = stokes_error_norms(mesh, velocity, pressure + 5.0, case, zero_mean=True)
        assert shifted.pressure_l2 == pytest.approx(base.pressure_l2, rel=1e-9)
        raw = stokes_error_norms(mesh, velocity, pressure + 5.0, case)
        assert raw.pressure_l2 > 1.0

    def test_error_norms_shape(self, mixed_level):
        """Wrongly shaped nodal arrays are rejected."""
        n = mixed_level.surrogate.n_vertices
        with pytest.raises(StokesError, match="Expected velocity"):
            stokes_error_norms(
                mixed_level.surrogate, np.zeros((n, 3)), np.zeros(n), stokes_affine()
            )
