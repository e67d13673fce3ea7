"""Shifted-boundary Stokes problem definition."""

from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum

import numpy as np

from fem.fields import Field
from geometry.boundary import EdgeBoundaryData
from mesh.grid import Mesh

DEFAULT_ALPHA = 2.5
DEFAULT_GAMMA = 1.0
DEFAULT_MU = 1.0

# (points (n, 2), unit normals (n, 2)) -> traction (n, 2)
Traction = Callable[[np.ndarray, np.ndarray], np.ndarray]


class StokesError(Exception):
    """Raised when a Stokes problem is ill-posed or its solve fails."""

    pass


class PressureGauge(Enum):
    """How the pressure level is fixed."""

    AUTO = "auto"
    NEUMANN = "neumann"
    ZERO_MEAN = "zero-mean"


@dataclass(frozen=True, eq=False)
class StokesProblem:
    """
    -div(2 mu eps(u)) + grad p = f, div u = 0, with Dirichlet and traction boundaries.

    Attributes:
        mesh: Surrogate mesh.
        edge_data: Boundary records of every surrogate boundary edge.
        forcing: f at (n, 2) points, returning (n, 2).
        dirichlet: u_D at the projected points x + d, returning (n, 2).
        traction: t_N on Neumann edges; required when any edge is Neumann.
        mu: Viscosity.
        alpha: Nitsche penalty.
        gamma: Pressure-stabilization coefficient.
        gauge: Pressure gauge; AUTO picks ZERO_MEAN iff there are no Neumann edges.
    """

    mesh: Mesh
    edge_data: list[EdgeBoundaryData]
    forcing: Field
    dirichlet: Field
    traction: Traction | None = None
    mu: float = DEFAULT_MU
    alpha: float = DEFAULT_ALPHA
    gamma: float = DEFAULT_GAMMA
    gauge: PressureGauge = PressureGauge.AUTO

    def __post_init__(self):
        for name in ("mu", "alpha", "gamma"):
            value = getattr(self, name)
            if not value > 0.0:
                raise StokesError(f"{name} must be positive, got {value}")
        if not self.edge_data:
            raise StokesError("Stokes problem needs surrogate boundary edges")

        neumann = [r for r in self.edge_data if not r.is_dirichlet]
        if neumann and self.gauge is PressureGauge.ZERO_MEAN:
            raise StokesError(
                f"Zero-mean pressure gauge requested but {len(neumann)} Neumann edges fix the pressure"
            )
        if not neumann and self.gauge is PressureGauge.NEUMANN:
            raise StokesError("Neumann gauge requested but the boundary has no Neumann edges")
        if neumann and self.traction is None:
            raise StokesError(f"{len(neumann)} Neumann edges but no traction given")
        shifted = [r.edge_id for r in neumann if not r.is_fitted]
        if shifted:
            raise StokesError(
                f"Neumann edges must lie on the true boundary (d = 0); "
                f"{len(shifted)} do not (first {shifted[0]})"
            )

    @property
    def zero_mean(self) -> bool:
        """Whether the resolved gauge adds the zero-mean multiplier."""
        if self.gauge is PressureGauge.AUTO:
            return all(r.is_dirichlet for r in self.edge_data)
        return self.gauge is PressureGauge.ZERO_MEAN

    @property
    def dirichlet_edges(self) -> list[EdgeBoundaryData]:
        return [r for r in self.edge_data if r.is_dirichlet]

    @property
    def neumann_edges(self) -> list[EdgeBoundaryData]:
        return [r for r in self.edge_data if not r.is_dirichlet]
