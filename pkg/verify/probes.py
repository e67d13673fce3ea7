"""Numerical property probes: coercivity, discrete trace, consistency and patch tests."""

import logging

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from fem.assembly import Assembler, LocalContribution
from fem.dofmap import DofMap
from fem.fields import ScalarSolution
from fem.quadrature import composite_cell_rule, edge_rule
from fem.shape import p1_gradients
from geometry.boundary import build_edge_data, surrogate_geometry
from geometry.domain import DomainGeometry
from harness.benchmark import build_level, trapezoid_geometry
from harness.ladder import ProblemKind
from harness.manufactured import poisson_affine, stokes_affine
from mesh.grid import Mesh
from mesh.metrics import compute_metrics
from poisson import PoissonProblem, assemble_poisson, form_action, shifted_gap_action
from poisson import solve_poisson
from stokes import StokesProblem, assemble_stokes, solve_stokes
from verify.report import ProbeReport, ProbeSettings

logger = logging.getLogger(__name__)


def _zero_scalar(x: np.ndarray) -> np.ndarray:
    return np.zeros(len(x))


def _zero_vector(x: np.ndarray) -> np.ndarray:
    return np.zeros((len(x), 2))


def _zero_traction(x: np.ndarray, normals: np.ndarray) -> np.ndarray:
    return np.zeros((len(x), 2))


def h1_gram(mesh: Mesh) -> sp.csr_matrix:
    """P1 Gram matrix of the H1 inner product (stiffness plus mass) on ``mesh``."""
    grads, area = p1_gradients(mesh.vertices[mesh.cells])
    area = np.abs(area)
    stiffness = area[:, None, None] * np.einsum("nid,njd->nij", grads, grads)
    mass = (area / 12.0)[:, None, None] * (np.ones((3, 3)) + np.eye(3))
    assembler = Assembler(DofMap(mesh.n_vertices))
    assembler.add(LocalContribution(rows=mesh.cells, matrices=stiffness + mass))
    return assembler.finalize().matrix


def smallest_generalized_eigenvalue(
    matrix: sp.spmatrix,
    gram: sp.spmatrix,
    rng: np.random.Generator,
    block: int = 4,
    tol: float = 1e-6,
    max_iterations: int = 500,
) -> float:
    """
    Smallest lambda with sym(A) v = lambda G v, by LOBPCG preconditioned with G^-1.

    This is the infimum of v^T A v / v^T G v over all discrete v, so it is
    positive exactly when the form is coercive in the G norm.
    """
    sym = (0.5 * (matrix + matrix.T)).tocsr()
    gram = sp.csc_matrix(gram)
    n = gram.shape[0]
    lu = spla.splu(gram)
    precond = spla.LinearOperator((n, n), matvec=lu.solve, matmat=lu.solve, dtype=float)
    start = rng.standard_normal((n, min(block, n)))
    values, _ = spla.lobpcg(
        sym, start, B=gram, M=precond, largest=False, tol=tol, maxiter=max_iterations
    )
    return float(np.min(values))


def run_coercivity_probe(
    kind: ProblemKind,
    alphas: list[float] | tuple[float, ...],
    mesh_sizes: list[float] | tuple[float, ...],
    settings: ProbeSettings | None = None,
    geometry: DomainGeometry | None = None,
) -> list[ProbeReport]:
    """
    Smallest eigenvalue of the (velocity) form against the H1 Gram matrix for every (alpha, h).

    For Poisson the full matrix is used, for Stokes the velocity block with one
    Gram block per component. The check passes when the eigenvalue is
    positive; below the coercivity threshold a failure is reported, not raised.
    """
    settings = settings or ProbeSettings()
    geometry = geometry or trapezoid_geometry(neumann_left=kind is ProblemKind.STOKES)
    reports = []
    for h in mesh_sizes:
        level = build_level(geometry, h)
        scalar_gram = h1_gram(level.surrogate)
        for alpha in alphas:
            rng = np.random.default_rng(settings.seed)
            gram = scalar_gram
            if kind is ProblemKind.POISSON:
                problem = PoissonProblem(
                    level.surrogate, level.edge_data, _zero_scalar, _zero_scalar, alpha=alpha
                )
                matrix = assemble_poisson(problem).matrix
            else:
                problem = StokesProblem(
                    level.surrogate,
                    level.edge_data,
                    _zero_vector,
                    _zero_vector,
                    traction=_zero_traction,
                    alpha=alpha,
                )
                system = assemble_stokes(problem)
                vertices = np.arange(level.surrogate.n_vertices)
                dofs = np.concatenate([system.dofmap.index(vertices, c) for c in (0, 1)])
                matrix = system.matrix[dofs][:, dofs]
                gram = sp.block_diag([scalar_gram, scalar_gram], format="csr")
            measured = smallest_generalized_eigenvalue(
                matrix,
                gram,
                rng,
                block=settings.coercivity_block,
                tol=settings.coercivity_tol,
                max_iterations=settings.coercivity_iterations,
            )
            report = ProbeReport(
                name=f"coercivity/{kind.value}/alpha={alpha:g}/h={h:.2E}",
                passed=measured > 0.0,
                measured=measured,
                tolerance=0.0,
                context={"kind": kind.value, "alpha": alpha, "mesh_size": h, "seed": settings.seed},
            )
            if not report.passed:
                logger.warning(f"Coercivity probe nonpositive: {report.to_line()}")
            reports.append(report)
    return reports


def trace_ratio(coords: np.ndarray, local_edge: int, coeffs: np.ndarray) -> np.ndarray:
    """
    h_T ||w||^2 on one edge over ||w||^2 on the cell, for P1 functions w.

    Args:
        coords: (3, 2) cell vertices.
        local_edge: Edge from vertex ``local_edge`` to the next.
        coeffs: (s, 3) nodal values of s functions.

    Returns:
        (s,) ratios; NaN where ||w||_cell <= 1e-12.
    """
    coeffs = np.atleast_2d(coeffs)
    p = np.asarray(coords, dtype=float)
    sides = np.linalg.norm(p[[1, 2, 0]] - p, axis=1)
    area = 0.5 * abs(
        (p[1, 0] - p[0, 0]) * (p[2, 1] - p[0, 1]) - (p[2, 0] - p[0, 0]) * (p[1, 1] - p[0, 1])
    )
    h_T = float(np.prod(sides)) / (2.0 * area)
    length = sides[local_edge]

    a = coeffs[:, local_edge]
    b = coeffs[:, (local_edge + 1) % 3]
    edge = length * (a * a + a * b + b * b) / 3.0
    cell = area / 12.0 * (np.sum(coeffs**2, axis=1) + np.sum(coeffs, axis=1) ** 2)
    ratio = np.full(len(coeffs), np.nan)
    ok = np.sqrt(cell) > 1e-12
    ratio[ok] = h_T * edge[ok] / cell[ok]
    return ratio


def max_trace_ratio(mesh: Mesh, n_samples: int, rng: np.random.Generator) -> float:
    """Largest sampled trace ratio over all boundary edges of ``mesh``."""
    worst = 0.0
    coords = mesh.vertices[mesh.cells]
    for cell, local in mesh.boundary_edges:
        coeffs = rng.standard_normal((n_samples, 3))
        worst = max(worst, float(np.nanmax(trace_ratio(coords[cell], int(local), coeffs))))
    return worst


def run_trace_probe(
    meshes: Mesh | list[Mesh], settings: ProbeSettings | None = None
) -> ProbeReport:
    """
    Sample the discrete trace inequality on every boundary cell of each mesh.

    With several meshes (a refinement ladder) the probe passes when the
    maximum ratio varies by less than ``settings.trace_variation`` relative to
    its smallest value; a single mesh passes when its maximum is finite.
    """
    settings = settings or ProbeSettings()
    meshes = [meshes] if isinstance(meshes, Mesh) else list(meshes)
    rng = np.random.default_rng(settings.seed)
    maxima = [max_trace_ratio(m, settings.trace_samples, rng) for m in meshes]
    variation = (max(maxima) - min(maxima)) / min(maxima)
    h = [compute_metrics(m).h_gamma for m in meshes]
    report = ProbeReport(
        name=f"trace/levels={len(meshes)}",
        passed=bool(np.isfinite(maxima).all() and variation < settings.trace_variation),
        measured=variation,
        tolerance=settings.trace_variation,
        context={
            "max_ratios": ",".join(f"{m:.4f}" for m in maxima),
            "h_gamma": ",".join(f"{x:.3e}" for x in h),
            "seed": settings.seed,
        },
    )
    logger.info(report.to_line())
    return report


def consistency_problem(
    case,
    mesh_size: float,
    alpha: float = 10.0,
    settings: ProbeSettings | None = None,
    geometry: DomainGeometry | None = None,
) -> PoissonProblem:
    """Poisson problem on a benchmark level with a high-order edge rule for the probe."""
    settings = settings or ProbeSettings()
    level = build_level(
        geometry or trapezoid_geometry(),
        mesh_size,
        quad=edge_rule(settings.consistency_edge_points),
    )
    return PoissonProblem(level.surrogate, level.edge_data, case.forcing, case.dirichlet, alpha)


def run_consistency_probe(
    problem: PoissonProblem,
    exact: ScalarSolution,
    settings: ProbeSettings | None = None,
    name: str = "consistency",
) -> ProbeReport:
    """
    Check a_h(u, v) - l_h(v) = -<S_h u - u_D, grad v . n> + alpha <h^-1 (S_h u - u_D), S_h v>.

    The exact u enters a_h through its values and gradients; the volume terms
    use a subdivided high-degree rule. The relative gap is measured on random
    discrete test functions v.
    """
    settings = settings or ProbeSettings()
    quad = composite_cell_rule(settings.consistency_degree, settings.consistency_levels)
    action = form_action(problem, exact, quad)
    load = assemble_poisson(problem, load_quad=quad).rhs
    gap = shifted_gap_action(problem, exact)

    rng = np.random.default_rng(settings.seed)
    v = rng.standard_normal((settings.test_functions, problem.mesh.n_vertices))
    lhs = v @ (action - load)
    rhs = v @ gap
    scale = np.abs(v @ action) + np.abs(v @ load)
    measured = float(np.max(np.abs(lhs - rhs) / np.maximum(scale, np.finfo(float).tiny)))

    h = max(r.h_T for r in problem.edge_data)
    report = ProbeReport(
        name=name,
        passed=measured <= settings.consistency_tol,
        measured=measured,
        tolerance=settings.consistency_tol,
        context={"alpha": problem.alpha, "h_gamma": f"{h:.3e}", "seed": settings.seed},
    )
    logger.info(report.to_line())
    return report


def run_patch_probe(
    kind: ProblemKind,
    mesh_size: float,
    settings: ProbeSettings | None = None,
    geometry: DomainGeometry | None = None,
) -> ProbeReport:
    """
    Solve an affine case on an unfitted level and report the max nodal error.

    Poisson uses u = 2x - 3y + 1; Stokes uses u = (x, -y), p = 1 with the
    Neumann left leg.
    """
    settings = settings or ProbeSettings()
    geometry = geometry or trapezoid_geometry(neumann_left=kind is ProblemKind.STOKES)
    level = build_level(geometry, mesh_size)
    mesh = level.surrogate
    if kind is ProblemKind.POISSON:
        case = poisson_affine()
        problem = PoissonProblem(mesh, level.edge_data, case.forcing, case.dirichlet)
        u_h = solve_poisson(problem)
        measured = float(np.max(np.abs(u_h - case.value(mesh.vertices))))
    else:
        flow = stokes_affine()
        problem = StokesProblem(
            mesh, level.edge_data, flow.forcing, flow.dirichlet, traction=flow.traction
        )
        solution = solve_stokes(problem)
        measured = float(
            max(
                np.max(np.abs(solution.velocity - flow.velocity(mesh.vertices))),
                np.max(np.abs(solution.pressure - flow.pressure(mesh.vertices))),
            )
        )
    report = ProbeReport(
        name=f"patch/{kind.value}/h={mesh_size:.2E}",
        passed=measured < settings.patch_tol,
        measured=measured,
        tolerance=settings.patch_tol,
        context={"mesh_size": mesh_size, "violating_edges": level.audit.violating_count},
    )
    logger.info(report.to_line())
    return report


def run_symmetry_probe(
    mesh_size: float,
    settings: ProbeSettings | None = None,
    geometry: DomainGeometry | None = None,
    tolerance: float = 1e-13,
) -> ProbeReport:
    """
    Assemble Poisson on the body-fitted limit (d = 0) and report max |A - A^T|.

    With d = 0 the extra shifted terms vanish and the form is the symmetric
    Nitsche form.
    """
    level = build_level(geometry or trapezoid_geometry(), mesh_size)
    fitted = build_edge_data(
        surrogate_geometry(level.surrogate, level.edge_data), level.surrogate, metrics=level.metrics
    )
    problem = PoissonProblem(level.surrogate, fitted, _zero_scalar, _zero_scalar)
    system = assemble_poisson(problem)
    measured = system.asymmetry() / max(float(abs(system.matrix).max()), 1.0)
    report = ProbeReport(
        name=f"symmetry/poisson/h={mesh_size:.2E}",
        passed=measured < tolerance,
        measured=measured,
        tolerance=tolerance,
        context={"mesh_size": mesh_size},
    )
    logger.info(report.to_line())
    return report
