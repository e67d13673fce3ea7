"""Interfaces of the exact fields consumed by assembly and error measurement."""

from collections.abc import Callable
from typing import Protocol

import numpy as np

# Maps (n, 2) points to (n,) values or (n, 2) vectors.
Field = Callable[[np.ndarray], np.ndarray]


class ScalarSolution(Protocol):
    """Exact scalar solution with its gradient and Poisson forcing -lap(u)."""

    def value(self, x: np.ndarray) -> np.ndarray: ...

    def gradient(self, x: np.ndarray) -> np.ndarray: ...

    def forcing(self, x: np.ndarray) -> np.ndarray: ...


class FlowSolution(Protocol):
    """
    Exact Stokes velocity and pressure with derived data.

    ``velocity_gradient`` returns (n, 2, 2) with entry [i, j] = d u_i / d x_j.
    ``traction`` evaluates (2 mu eps(u) - p I) n for given unit normals.
    """

    mu: float

    def velocity(self, x: np.ndarray) -> np.ndarray: ...

    def velocity_gradient(self, x: np.ndarray) -> np.ndarray: ...

    def pressure(self, x: np.ndarray) -> np.ndarray: ...

    def forcing(self, x: np.ndarray) -> np.ndarray: ...

    def traction(self, x: np.ndarray, normals: np.ndarray) -> np.ndarray: ...
