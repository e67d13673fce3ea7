"""Shifted-boundary Poisson problem definition."""

from dataclasses import dataclass

from fem.fields import Field
from geometry.boundary import EdgeBoundaryData
from mesh.grid import Mesh

DEFAULT_ALPHA = 10.0


class PoissonError(Exception):
    """Raised when a Poisson problem is ill-posed or its solve fails."""

    pass


@dataclass(frozen=True, eq=False)
class PoissonProblem:
    """
    -lap(u) = f in the true domain, u = u_D on its boundary, posed on a surrogate mesh.

    Attributes:
        mesh: Surrogate mesh.
        edge_data: Boundary records of every surrogate boundary edge.
        forcing: f, evaluated at (n, 2) points.
        dirichlet: u_D, evaluated at the projected points x + d.
        alpha: Nitsche penalty.
    """

    mesh: Mesh
    edge_data: list[EdgeBoundaryData]
    forcing: Field
    dirichlet: Field
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        if not self.alpha > 0.0:
            raise PoissonError(f"Penalty alpha must be positive, got {self.alpha}")
        if not self.edge_data:
            raise PoissonError("Poisson problem needs surrogate boundary edges")
        neumann = [r.edge_id for r in self.edge_data if not r.is_dirichlet]
        if neumann:
            raise PoissonError(
                f"Poisson problem supports Dirichlet boundaries only; "
                f"{len(neumann)} Neumann edges (first {neumann[0]})"
            )
