"""Solving the Stokes problem and measuring velocity, strain and pressure errors."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from fem.fields import FlowSolution
from fem.quadrature import QuadratureRule, cell_rule
from fem.shape import map_points, p1_gradients
from fem.solver import SolveMethod, SolverError, solve
from mesh.grid import Mesh
from stokes.assembly import PRESSURE, assemble_stokes
from stokes.problem import StokesError, StokesProblem

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class StokesSolution:
    """Nodal velocity (n, 2) and pressure (n,) on the surrogate vertices."""

    velocity: np.ndarray
    pressure: np.ndarray
    zero_mean: bool
    residual: float


@dataclass(frozen=True)
class StokesErrors:
    """L2 errors over the surrogate domain."""

    velocity_l2: float
    strain_l2: float
    pressure_l2: float


def solve_stokes(
    problem: StokesProblem, method: SolveMethod = SolveMethod.DIRECT
) -> StokesSolution:
    """
    Assemble and solve the Stokes problem.

    Raises:
        StokesError: If the linear solve fails; the message carries the
            parameters and mesh size.
    """
    system = assemble_stokes(problem)
    try:
        x = solve(system, method)
    except SolverError as e:
        mesh = problem.mesh
        logger.error(f"Stokes solve failed with alpha {problem.alpha}, gamma {problem.gamma}: {e}")
        raise StokesError(
            f"Stokes solve failed (alpha={problem.alpha}, gamma={problem.gamma}, "
            f"mu={problem.mu}, {mesh.n_vertices} vertices, {mesh.n_cells} cells): {e}"
        ) from e

    fields = system.dofmap.split(x)
    return StokesSolution(
        velocity=fields[:, :PRESSURE].copy(),
        pressure=fields[:, PRESSURE].copy(),
        zero_mean=problem.zero_mean,
        residual=system.residual(x),
    )


def _mean(values_at_points: np.ndarray, area: np.ndarray, weights: np.ndarray) -> float:
    return float(np.sum(area * (values_at_points @ weights)) / area.sum())


def stokes_error_norms(
    mesh: Mesh,
    velocity: np.ndarray,
    pressure: np.ndarray,
    exact: FlowSolution,
    zero_mean: bool = False,
    quad: QuadratureRule | None = None,
) -> StokesErrors:
    """
    Velocity, strain and pressure L2 errors with a degree-4 rule.

    In zero-mean mode both pressures have their mean over the surrogate domain
    removed before comparison.
    """
    quad = quad or cell_rule(4)
    velocity = np.asarray(velocity, dtype=float)
    pressure = np.asarray(pressure, dtype=float)
    if velocity.shape != (mesh.n_vertices, 2) or pressure.shape != (mesh.n_vertices,):
        raise StokesError(
            f"Expected velocity ({mesh.n_vertices}, 2) and pressure ({mesh.n_vertices},), "
            f"got {velocity.shape} and {pressure.shape}"
        )

    coords = mesh.vertices[mesh.cells]
    grads, area = p1_gradients(coords)
    pts = map_points(coords, quad.points).reshape(-1, 2)
    shape = (mesh.n_cells, quad.size)
    lam = quad.points

    local_u = velocity[mesh.cells]  # (n, 3, 2)
    u_h = np.einsum("qa,nac->nqc", lam, local_u)
    du = exact.velocity(pts).reshape(*shape, 2) - u_h

    grad_h = np.einsum("nac,nad->ncd", local_u, grads)
    grad_e = exact.velocity_gradient(pts).reshape(*shape, 2, 2) - grad_h[:, None]
    strain = 0.5 * (grad_e + np.swapaxes(grad_e, -1, -2))

    p_exact = exact.pressure(pts).reshape(shape)
    p_h = pressure[mesh.cells] @ lam.T
    if zero_mean:
        p_exact = p_exact - _mean(p_exact, area, quad.weights)
        p_h = p_h - _mean(p_h, area, quad.weights)
    dp = p_exact - p_h

    def norm(sq: np.ndarray) -> float:
        return math.sqrt(float(np.sum(area * (sq @ quad.weights))))

    return StokesErrors(
        velocity_l2=norm(np.sum(du**2, axis=2)),
        strain_l2=norm(np.sum(strain**2, axis=(2, 3))),
        pressure_l2=norm(dp**2),
    )
