"""Solving the Poisson problem and measuring its error."""

import logging
import math
from dataclasses import dataclass

import numpy as np

from fem.fields import ScalarSolution
from fem.quadrature import QuadratureRule, cell_rule
from fem.shape import map_points, p1_gradients
from fem.solver import SolveMethod, SolverError, solve
from mesh.grid import Mesh
from poisson.assembly import assemble_poisson
from poisson.problem import PoissonError, PoissonProblem

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PoissonErrors:
    """Error of a discrete solution over the surrogate domain."""

    l2: float
    h1_semi: float


def solve_poisson(
    problem: PoissonProblem, method: SolveMethod = SolveMethod.DIRECT
) -> np.ndarray:
    """
    Assemble and solve the Poisson problem.

    Returns:
        Nodal values on the surrogate vertices.

    Raises:
        PoissonError: If the linear solve fails; the message carries alpha and
            the mesh sizes.
    """
    system = assemble_poisson(problem)
    try:
        return solve(system, method)
    except SolverError as e:
        mesh = problem.mesh
        h_max = max(r.h_T for r in problem.edge_data)
        logger.error(f"Poisson solve failed with alpha {problem.alpha}: {e}")
        raise PoissonError(
            f"Poisson solve failed (alpha={problem.alpha}, {mesh.n_vertices} vertices, "
            f"{mesh.n_cells} cells, boundary h_T <= {h_max:.3e}): {e}"
        ) from e


def error_norms(
    mesh: Mesh,
    u_h: np.ndarray,
    exact: ScalarSolution,
    quad: QuadratureRule | None = None,
) -> PoissonErrors:
    """
    L2 and H1-seminorm errors of a P1 field against an exact solution.

    Integrals run over the cells of ``mesh`` only, with a degree-4 rule unless
    ``quad`` is given.
    """
    quad = quad or cell_rule(4)
    u_h = np.asarray(u_h, dtype=float)
    if u_h.shape != (mesh.n_vertices,):
        raise PoissonError(f"Expected {mesh.n_vertices} nodal values, got shape {u_h.shape}")

    coords = mesh.vertices[mesh.cells]
    grads, area = p1_gradients(coords)
    pts = map_points(coords, quad.points).reshape(-1, 2)
    shape = (mesh.n_cells, quad.size)

    local = u_h[mesh.cells]
    diff = exact.value(pts).reshape(shape) - local @ quad.points.T
    grad_h = np.einsum("ni,nid->nd", local, grads)
    grad_diff = exact.gradient(pts).reshape(*shape, 2) - grad_h[:, None, :]

    l2 = math.sqrt(float(np.sum(area * (diff**2 @ quad.weights))))
    h1 = math.sqrt(float(np.sum(area * (np.sum(grad_diff**2, axis=2) @ quad.weights))))
    return PoissonErrors(l2=l2, h1_semi=h1)
