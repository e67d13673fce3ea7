"""Shifted-boundary Nitsche discretization of the Poisson problem."""

from poisson.assembly import assemble_poisson, form_action, shifted_gap_action
from poisson.problem import DEFAULT_ALPHA, PoissonError, PoissonProblem
from poisson.solve import PoissonErrors, error_norms, solve_poisson

__all__ = [
    "DEFAULT_ALPHA",
    "PoissonError",
    "PoissonErrors",
    "PoissonProblem",
    "assemble_poisson",
    "error_norms",
    "form_action",
    "shifted_gap_action",
    "solve_poisson",
]
