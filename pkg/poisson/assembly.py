"""Assembly of the shifted-boundary Poisson forms."""

import logging

import numpy as np

from fem.assembly import Assembler, LocalContribution, SparseSystem
from fem.dofmap import DofMap
from fem.fields import ScalarSolution
from fem.quadrature import QuadratureRule, cell_rule
from fem.shape import edge_shape_values, map_points, p1_gradients
from fem.shifted import eval_shifted
from geometry.boundary import EdgeBatch
from poisson.problem import PoissonProblem

logger = logging.getLogger(__name__)


def _edge_kernels(problem: PoissonProblem, grads: np.ndarray):
    """Per-edge arrays shared by the matrix, load and residual terms."""
    batch = EdgeBatch.from_records(problem.edge_data)
    g = grads[batch.cells]  # (k, 3, 2)
    values = edge_shape_values(batch.params, batch.local_edges)  # (k, q, 3)
    gd = np.einsum("kqd,kid->kqi", batch.distance_vectors, g)  # grad(phi) . d
    shifted = eval_shifted(values, g, batch.distance_vectors)
    gn = np.einsum("kid,kd->ki", g, batch.normals)  # grad(phi) . n_tilde
    return batch, g, values, shifted, gd, gn


def _load(problem: PoissonProblem, coords, area, quad: QuadratureRule) -> np.ndarray:
    pts = map_points(coords, quad.points)
    f = problem.forcing(pts.reshape(-1, 2)).reshape(pts.shape[:2])
    return area[:, None] * np.einsum("q,nq,qi->ni", quad.weights, f, quad.points)


def assemble_poisson(
    problem: PoissonProblem, load_quad: QuadratureRule | None = None
) -> SparseSystem:
    """
    Assemble a_h(u, w) = l_h(w) over the surrogate mesh.

    a_h(u, w) = (grad u, grad w) - <grad u . n, S_h w> - <S_h u, grad w . n>
                + <alpha / h_perp S_h u, S_h w> + <grad u . n, grad w . d>
    l_h(w)    = (f, w) - <u_D, grad w . n> + <alpha / h_perp u_D, S_h w>

    with u_D evaluated at x + d. Rows index test functions, columns trial
    functions. For d = 0 the matrix is the symmetric classical Nitsche matrix.

    Args:
        problem: The Poisson problem.
        load_quad: Cell rule for (f, w); degree 4 by default.

    Returns:
        The assembled system over one dof per surrogate vertex.
    """
    mesh = problem.mesh
    load_quad = load_quad or cell_rule(4)
    dofmap = DofMap(mesh.n_vertices)
    coords = mesh.vertices[mesh.cells]
    grads, area = p1_gradients(coords)
    cell_dofs = mesh.cells

    assembler = Assembler(dofmap)
    stiffness = area[:, None, None] * np.einsum("nid,njd->nij", grads, grads)
    assembler.add(
        LocalContribution(
            rows=cell_dofs,
            matrices=stiffness,
            vectors=_load(problem, coords, area, load_quad),
        )
    )

    batch, _, _, shifted, gd, gn = _edge_kernels(problem, grads)
    w = batch.weights
    penalty = problem.alpha / batch.h_perp
    ws = np.einsum("kq,kqi->ki", w, shifted)
    matrices = (
        -ws[:, :, None] * gn[:, None, :]
        - gn[:, :, None] * ws[:, None, :]
        + penalty[:, None, None] * np.einsum("kq,kqi,kqj->kij", w, shifted, shifted)
        + np.einsum("kq,kqi->ki", w, gd)[:, :, None] * gn[:, None, :]
    )
    u_bar = problem.dirichlet(batch.targets.reshape(-1, 2)).reshape(w.shape)
    wu = w * u_bar
    vectors = -wu.sum(axis=1)[:, None] * gn + penalty[:, None] * np.einsum(
        "kq,kqi->ki", wu, shifted
    )
    assembler.add(
        LocalContribution(rows=mesh.cells[batch.cells], matrices=matrices, vectors=vectors)
    )

    system = assembler.finalize(alpha=problem.alpha, n_edges=batch.size)
    logger.info(
        f"Assembled Poisson system: {dofmap.n_dofs} dofs, {system.matrix.nnz} nonzeros, "
        f"{batch.size} boundary edges, alpha {problem.alpha}"
    )
    return system


def form_action(
    problem: PoissonProblem, exact: ScalarSolution, quad: QuadratureRule | None = None
) -> np.ndarray:
    """
    a_h(u, phi_i) for an exact (non-discrete) u against every basis function.

    S_h u is evaluated as u(x) + grad u(x) . d. The volume term uses ``quad``,
    which should be accurate enough for ``exact``.
    """
    mesh = problem.mesh
    quad = quad or cell_rule(6)
    coords = mesh.vertices[mesh.cells]
    grads, area = p1_gradients(coords)

    pts = map_points(coords, quad.points)
    gu = exact.gradient(pts.reshape(-1, 2)).reshape(*pts.shape[:2], 2)
    volume = area[:, None] * np.einsum("q,nqd,nid->ni", quad.weights, gu, grads)
    action = np.bincount(mesh.cells.ravel(), weights=volume.ravel(), minlength=mesh.n_vertices)

    batch, _, _, shifted, gd, gn = _edge_kernels(problem, grads)
    w = batch.weights
    x = batch.points.reshape(-1, 2)
    grad_u = exact.gradient(x).reshape(*w.shape, 2)
    u = exact.value(x).reshape(w.shape)
    su = u + np.einsum("kqd,kqd->kq", grad_u, batch.distance_vectors)
    dun = np.einsum("kqd,kd->kq", grad_u, batch.normals)
    penalty = problem.alpha / batch.h_perp

    edge = (
        -np.einsum("kq,kq,kqi->ki", w, dun, shifted)
        - np.einsum("kq,kq->k", w, su)[:, None] * gn
        + penalty[:, None] * np.einsum("kq,kq,kqi->ki", w, su, shifted)
        + np.einsum("kq,kq,kqi->ki", w, dun, gd)
    )
    action += np.bincount(
        mesh.cells[batch.cells].ravel(), weights=edge.ravel(), minlength=mesh.n_vertices
    )
    return action


def shifted_gap_action(problem: PoissonProblem, exact: ScalarSolution) -> np.ndarray:
    """
    -<S_h u - u_D, grad phi_i . n> + alpha <h_perp^-1 (S_h u - u_D), S_h phi_i> per basis function.

    This is what a_h(u, .) - l_h(.) reduces to for the exact solution u.
    """
    mesh = problem.mesh
    grads, _ = p1_gradients(mesh.vertices[mesh.cells])
    batch, _, _, shifted, _, gn = _edge_kernels(problem, grads)
    w = batch.weights
    x = batch.points.reshape(-1, 2)
    su = exact.value(x).reshape(w.shape) + np.einsum(
        "kqd,kqd->kq", exact.gradient(x).reshape(*w.shape, 2), batch.distance_vectors
    )
    gap = su - problem.dirichlet(batch.targets.reshape(-1, 2)).reshape(w.shape)
    penalty = problem.alpha / batch.h_perp
    edge = -np.einsum("kq,kq->k", w, gap)[:, None] * gn + penalty[:, None] * np.einsum(
        "kq,kq,kqi->ki", w, gap, shifted
    )
    return np.bincount(
        mesh.cells[batch.cells].ravel(), weights=edge.ravel(), minlength=mesh.n_vertices
    )
