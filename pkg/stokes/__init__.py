"""Stabilized equal-order shifted-boundary discretization of the Stokes problem."""

from stokes.assembly import assemble_stokes, pressure_mass, stokes_dofmap
from stokes.problem import (
    DEFAULT_ALPHA,
    DEFAULT_GAMMA,
    DEFAULT_MU,
    PressureGauge,
    StokesError,
    StokesProblem,
)
from stokes.solve import StokesErrors, StokesSolution, solve_stokes, stokes_error_norms

__all__ = [
    "DEFAULT_ALPHA",
    "DEFAULT_GAMMA",
    "DEFAULT_MU",
    "PressureGauge",
    "StokesError",
    "StokesErrors",
    "StokesProblem",
    "StokesSolution",
    "assemble_stokes",
    "pressure_mass",
    "solve_stokes",
    "stokes_dofmap",
    "stokes_error_norms",
]
