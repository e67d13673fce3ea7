"""Degree-of-freedom numbering for scalar, vector and mixed P1 spaces."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DofMap:
    """
    Interleaved vertex numbering with an optional trailing multiplier.

    Component ``c`` of vertex ``v`` has global index ``n_components * v + c``.
    When ``multiplier`` is set one extra dof is appended after all vertex dofs.

    Attributes:
        n_vertices: Number of mesh vertices.
        n_components: Unknowns per vertex (1 for Poisson, 3 for Stokes).
        multiplier: Whether a Lagrange-multiplier dof is present.
    """

    n_vertices: int
    n_components: int = 1
    multiplier: bool = False

    def __post_init__(self):
        if self.n_vertices < 1 or self.n_components < 1:
            raise ValueError(
                f"DofMap needs positive sizes, got {self.n_vertices} vertices "
                f"x {self.n_components} components"
            )

    @property
    def n_vertex_dofs(self) -> int:
        return self.n_vertices * self.n_components

    @property
    def n_dofs(self) -> int:
        return self.n_vertex_dofs + int(self.multiplier)

    @property
    def multiplier_dof(self) -> int | None:
        return self.n_vertex_dofs if self.multiplier else None

    def index(self, vertex, component: int = 0):
        """Global index (or array of indices) of ``component`` at ``vertex``."""
        if not 0 <= component < self.n_components:
            raise IndexError(f"Component {component} out of range [0, {self.n_components})")
        return self.n_components * np.asarray(vertex) + component

    def cell_dofs(self, cells: np.ndarray) -> np.ndarray:
        """
        (m, 3 * n_components) dofs of each cell, vertex-major then component.
        """
        cells = np.asarray(cells)
        comps = np.arange(self.n_components)
        return (self.n_components * cells[..., None] + comps).reshape(len(cells), -1)

    def component(self, x: np.ndarray, component: int) -> np.ndarray:
        """Nodal values of one component from a global vector."""
        return np.asarray(x)[self.index(np.arange(self.n_vertices), component)]

    def split(self, x: np.ndarray) -> np.ndarray:
        """(n_vertices, n_components) view of the vertex part of ``x``."""
        return np.asarray(x)[: self.n_vertex_dofs].reshape(self.n_vertices, self.n_components)
