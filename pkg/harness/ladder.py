"""Convergence-ladder driver: solve a manufactured case on a refinement ladder and compute rates."""

import logging
import math
import time
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from fem.quadrature import edge_rule
from fem.solver import SolveMethod, SolverError
from geometry.boundary import audit_normals, build_edge_data, surrogate_geometry
from geometry.domain import DomainGeometry, GeometryError
from harness.benchmark import (
    DEFAULT_ASPECT,
    DEFAULT_MARGIN,
    BenchmarkLevel,
    build_level,
    trapezoid_geometry,
)
from harness.manufactured import FlowCase, ScalarCase
from mesh.grid import Mesh, MeshError, Orientation
from poisson import DEFAULT_ALPHA as POISSON_ALPHA
from poisson import PoissonError, PoissonProblem, error_norms, solve_poisson
from stokes import DEFAULT_ALPHA as STOKES_ALPHA
from stokes import (
    PressureGauge,
    StokesError,
    StokesProblem,
    solve_stokes,
    stokes_error_norms,
)

logger = logging.getLogger(__name__)

POISSON_NORMS = ("l2", "h1")
STOKES_NORMS = ("strain", "velocity", "pressure")


class ProblemKind(Enum):
    """PDE solved on each level."""

    POISSON = "poisson"
    STOKES = "stokes"

    @property
    def norms(self) -> tuple[str, ...]:
        return POISSON_NORMS if self is ProblemKind.POISSON else STOKES_NORMS


class LevelStatus(Enum):
    """Status of one ladder level."""

    PENDING = "pending"
    RUNNING = "running"
    DONE = "done"
    FAILED = "failed"


class LadderError(Exception):
    """Raised when a ladder cannot run or a level fails; carries the rows finished so far."""

    def __init__(self, message: str, rows: list["ConvergenceRow"] | None = None):
        super().__init__(message)
        self.rows = rows or []


@dataclass
class LadderParams:
    """Discretization and construction parameters of a ladder run."""

    alpha: float | None = None
    gamma: float = 1.0
    mu: float = 1.0
    aspect: float = DEFAULT_ASPECT
    orientation: Orientation = Orientation.WIDE
    method: SolveMethod = SolveMethod.DIRECT
    margin: float = DEFAULT_MARGIN
    gauge: PressureGauge = PressureGauge.AUTO
    edge_points: int = 3
    keep_fields: bool = False

    def resolved_alpha(self, kind: ProblemKind) -> float:
        if self.alpha is not None:
            return self.alpha
        return POISSON_ALPHA if kind is ProblemKind.POISSON else STOKES_ALPHA


@dataclass(frozen=True)
class ConvergenceRow:
    """
    One level of a convergence table.

    ``rates`` holds log(e_prev / e) / log(h_prev / h) per norm, None on the first
    level. ``surrogate`` and ``fields`` are only set when fields are kept.
    """

    mesh_size: float
    errors: dict[str, float]
    rates: dict[str, float | None]
    violating_count: int
    total_count: int
    variant: str = "sbm"
    surrogate: Mesh | None = field(default=None, compare=False, repr=False)
    fields: dict[str, np.ndarray] = field(default_factory=dict, compare=False, repr=False)

    @property
    def percentage(self) -> float:
        return 100.0 * self.violating_count / self.total_count if self.total_count else 0.0


@dataclass
class LevelState:
    """Runtime state of one ladder level."""

    mesh_size: float
    status: LevelStatus = LevelStatus.PENDING
    row: ConvergenceRow | None = None
    elapsed: float = 0.0
    last_error: str | None = None


def compute_rates(rows: list[ConvergenceRow]) -> list[ConvergenceRow]:
    """
    Fill in per-level rates from consecutive error pairs.

    Rates only use ratios, so they are invariant under uniform scaling of the
    mesh-size column. A non-positive rate is logged as a warning.
    """
    out = []
    for k, row in enumerate(rows):
        rates: dict[str, float | None] = {}
        for name, err in row.errors.items():
            if k == 0:
                rates[name] = None
                continue
            prev = rows[k - 1]
            e0 = prev.errors[name]
            if e0 <= 0.0 or err <= 0.0:
                rates[name] = None
                continue
            rate = math.log(e0 / err) / math.log(prev.mesh_size / row.mesh_size)
            if rate <= 0.0:
                logger.warning(
                    f"Non-monotone {name} error at h={row.mesh_size:.2e}: "
                    f"{e0:.3e} -> {err:.3e} (rate {rate:.2f})"
                )
            rates[name] = rate
        out.append(replace(row, rates=rates))
    return out


class LadderRunner:
    """
    Runs one manufactured case over a list of mesh sizes.

    Each level builds its grid, solves, and measures the error; a failure stops
    the run with the rows finished so far attached to the raised error.
    """

    def __init__(
        self,
        case: ScalarCase | FlowCase,
        kind: ProblemKind,
        params: LadderParams | None = None,
        geometry: DomainGeometry | None = None,
    ):
        self.case = case
        self.kind = kind
        self.params = params or LadderParams()
        self.geometry = geometry or trapezoid_geometry(neumann_left=kind is ProblemKind.STOKES)
        self._levels: list[LevelState] = []

        if kind is ProblemKind.STOKES and not isinstance(case, FlowCase):
            raise LadderError(f"Stokes ladder needs a flow case, got '{case.name}'")
        if kind is ProblemKind.POISSON and not isinstance(case, ScalarCase):
            raise LadderError(f"Poisson ladder needs a scalar case, got '{case.name}'")
        if kind is ProblemKind.STOKES and case.mu != self.params.mu:
            raise LadderError(f"Case viscosity {case.mu} differs from mu={self.params.mu}")

    @property
    def levels(self) -> list[LevelState]:
        return list(self._levels)

    def _fitted(self, level: BenchmarkLevel) -> BenchmarkLevel:
        """Same surrogate, with the true boundary moved onto the surrogate boundary."""
        geom = surrogate_geometry(level.surrogate, level.edge_data)
        edge_data = build_edge_data(
            geom, level.surrogate, edge_rule(self.params.edge_points), level.metrics
        )
        return replace(level, edge_data=edge_data, audit=audit_normals(edge_data))

    def _solve(self, level: BenchmarkLevel, variant: str) -> ConvergenceRow:
        params = self.params
        alpha = params.resolved_alpha(self.kind)
        mesh = level.surrogate
        fields: dict[str, np.ndarray] = {}

        if self.kind is ProblemKind.POISSON:
            problem = PoissonProblem(
                mesh=mesh,
                edge_data=level.edge_data,
                forcing=self.case.forcing,
                dirichlet=self.case.dirichlet,
                alpha=alpha,
            )
            u_h = solve_poisson(problem, params.method)
            norms = error_norms(mesh, u_h, self.case)
            errors = {"l2": norms.l2, "h1": norms.h1_semi}
            if params.keep_fields:
                fields = {"u": u_h, "u_exact": self.case.value(mesh.vertices)}
        else:
            problem = StokesProblem(
                mesh=mesh,
                edge_data=level.edge_data,
                forcing=self.case.forcing,
                dirichlet=self.case.dirichlet,
                traction=self.case.traction,
                mu=params.mu,
                alpha=alpha,
                gamma=params.gamma,
                gauge=params.gauge,
            )
            solution = solve_stokes(problem, params.method)
            norms = stokes_error_norms(
                mesh, solution.velocity, solution.pressure, self.case, solution.zero_mean
            )
            errors = {
                "strain": norms.strain_l2,
                "velocity": norms.velocity_l2,
                "pressure": norms.pressure_l2,
            }
            if params.keep_fields:
                fields = {"velocity": solution.velocity, "pressure": solution.pressure}

        return ConvergenceRow(
            mesh_size=level.mesh_size,
            errors=errors,
            rates={},
            violating_count=level.audit.violating_count,
            total_count=level.audit.total_count,
            variant=variant,
            surrogate=mesh if params.keep_fields else None,
            fields=fields,
        )

    def run(self, mesh_sizes: list[float], fitted: bool = False) -> list[ConvergenceRow]:
        """
        Run every level in order.

        Args:
            mesh_sizes: Strictly decreasing positive sizes, at least two.
            fitted: Solve the body-fitted limit instead of the shifted problem.

        Returns:
            One row per level with rates filled in.

        Raises:
            LadderError: On invalid sizes, or when a level fails (partial rows attached).
        """
        sizes = [float(h) for h in mesh_sizes]
        if len(sizes) < 2:
            raise LadderError(f"A convergence ladder needs at least 2 levels, got {len(sizes)}")
        decreasing = all(b < a for a, b in zip(sizes, sizes[1:], strict=False))
        if any(h <= 0.0 for h in sizes) or not decreasing:
            raise LadderError(f"Mesh sizes must be positive and strictly decreasing: {sizes}")

        variant = "fitted" if fitted else "sbm"
        self._levels = [LevelState(mesh_size=h) for h in sizes]
        rows: list[ConvergenceRow] = []
        for state in self._levels:
            state.status = LevelStatus.RUNNING
            start = time.monotonic()
            try:
                level = build_level(
                    self.geometry,
                    state.mesh_size,
                    self.params.aspect,
                    self.params.orientation,
                    self.params.margin,
                    edge_rule(self.params.edge_points),
                )
                if fitted:
                    level = self._fitted(level)
                state.row = self._solve(level, variant)
            except (MeshError, GeometryError, SolverError, PoissonError, StokesError) as e:
                state.status = LevelStatus.FAILED
                state.last_error = str(e)
                state.elapsed = time.monotonic() - start
                logger.error(f"Level h={state.mesh_size:.2e} ({variant}) failed: {e}")
                raise LadderError(
                    f"Level h={state.mesh_size:.2e} failed: {e}", compute_rates(rows)
                ) from e

            state.status = LevelStatus.DONE
            state.elapsed = time.monotonic() - start
            rows.append(state.row)
            summary = ", ".join(f"{k} {v:.3e}" for k, v in state.row.errors.items())
            logger.info(
                f"{self.kind.value} {variant} h={state.mesh_size:.2e} done in "
                f"{state.elapsed:.1f}s: {summary}"
            )
        return compute_rates(rows)


def run_ladder(
    case: ScalarCase | FlowCase,
    kind: ProblemKind,
    mesh_sizes: list[float],
    params: LadderParams | None = None,
    geometry: DomainGeometry | None = None,
) -> list[ConvergenceRow]:
    """Run the shifted-boundary ladder; see :meth:`LadderRunner.run`."""
    return LadderRunner(case, kind, params, geometry).run(mesh_sizes)


def run_bodyfitted_comparison(
    case: ScalarCase | FlowCase,
    kind: ProblemKind,
    mesh_sizes: list[float],
    params: LadderParams | None = None,
    geometry: DomainGeometry | None = None,
) -> tuple[list[ConvergenceRow], list[ConvergenceRow]]:
    """
    Run the shifted and the body-fitted variant on matched grids.

    The body-fitted variant keeps each level's surrogate mesh and takes the
    surrogate boundary itself as the true boundary (d = 0, data evaluated on
    it), tags inherited edge by edge.

    Returns:
        Tuple of (shifted rows, fitted rows).
    """
    runner = LadderRunner(case, kind, params, geometry)
    sbm = runner.run(mesh_sizes)
    fitted = runner.run(mesh_sizes, fitted=True)
    return sbm, fitted
