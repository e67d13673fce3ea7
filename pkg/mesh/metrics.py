"""Element and boundary size metrics used by the penalty and stabilization scalings."""

import math
from dataclasses import dataclass

import numpy as np

from mesh.grid import Mesh, MeshError


@dataclass(frozen=True, eq=False)
class ElementMetrics:
    """
    Per-cell size metrics of a mesh.

    Attributes:
        h_T: Circumscribed diameter of each cell.
        h_T_i: Inscribed diameter of each cell.
        h_tau: Geometric mean sqrt(h_T * h_T_i).
        area: Cell areas.
        h_perp: For every boundary edge of the mesh (same order as
            ``Mesh.boundary_edges``), area of the owning cell over edge length.
        boundary_cells: Owning cell of every boundary edge.
    """

    h_T: np.ndarray
    h_T_i: np.ndarray
    h_tau: np.ndarray
    area: np.ndarray
    h_perp: np.ndarray
    boundary_cells: np.ndarray

    @property
    def h_omega(self) -> float:
        """Largest cell diameter."""
        return float(self.h_T.max())

    @property
    def h_gamma(self) -> float:
        """Largest diameter among cells owning a boundary edge."""
        if len(self.boundary_cells) == 0:
            return 0.0
        return float(self.h_T[self.boundary_cells].max())

    @property
    def length_scale(self) -> float:
        """l = meas(domain)^(1/2)."""
        return math.sqrt(float(self.area.sum()))


def compute_metrics(mesh: Mesh) -> ElementMetrics:
    """
    Compute h_T, h_T^i, h_tau, areas and boundary-edge h_perp.

    Args:
        mesh: A valid mesh.

    Returns:
        The metrics of every cell and boundary edge.

    Raises:
        MeshError: If a cell has zero area.
    """
    p = mesh.vertices[mesh.cells]
    a = np.linalg.norm(p[:, 1] - p[:, 0], axis=1)
    b = np.linalg.norm(p[:, 2] - p[:, 1], axis=1)
    c = np.linalg.norm(p[:, 0] - p[:, 2], axis=1)
    area = np.abs(mesh.areas)
    if np.any(area <= 0.0):
        raise MeshError(f"Degenerate cell {int(np.argmin(area))} with zero area")

    h_T = a * b * c / (2.0 * area)
    h_T_i = 4.0 * area / (a + b + c)
    h_tau = np.sqrt(h_T * h_T_i)

    boundary_cells = mesh.boundary_edges[:, 0]
    h_perp = area[boundary_cells] / mesh.boundary_lengths

    return ElementMetrics(
        h_T=h_T,
        h_T_i=h_T_i,
        h_tau=h_tau,
        area=area,
        h_perp=h_perp,
        boundary_cells=boundary_cells,
    )
