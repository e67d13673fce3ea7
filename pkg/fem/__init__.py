"""P1 kernels: quadrature, shape functions, shifted operator, assembly and solvers."""

from fem.assembly import Assembler, AssemblyError, LocalContribution, SparseSystem, assemble
from fem.dofmap import DofMap
from fem.fields import Field, FlowSolution, ScalarSolution
from fem.quadrature import (
    QuadratureRule,
    RuleKind,
    cell_rule,
    composite_cell_rule,
    edge_rule,
)
from fem.shape import edge_shape_values, map_points, p1_gradients, shape_p1
from fem.shifted import eval_shifted
from fem.solver import SolveMethod, SolverError, solve

__all__ = [
    "Assembler",
    "AssemblyError",
    "DofMap",
    "Field",
    "FlowSolution",
    "LocalContribution",
    "QuadratureRule",
    "RuleKind",
    "ScalarSolution",
    "SolveMethod",
    "SolverError",
    "SparseSystem",
    "assemble",
    "cell_rule",
    "composite_cell_rule",
    "edge_rule",
    "edge_shape_values",
    "eval_shifted",
    "map_points",
    "p1_gradients",
    "shape_p1",
    "solve",
]
