"""Assembly of the stabilized equal-order shifted-boundary Stokes system."""

import logging

import numpy as np

from fem.assembly import Assembler, LocalContribution, SparseSystem
from fem.dofmap import DofMap
from fem.quadrature import QuadratureRule, cell_rule
from fem.shape import edge_shape_values, map_points, p1_gradients
from fem.shifted import eval_shifted
from geometry.boundary import EdgeBatch
from mesh.metrics import compute_metrics
from stokes.problem import StokesProblem

logger = logging.getLogger(__name__)

# Unknowns per vertex: u_x, u_y, p.
N_FIELDS = 3
PRESSURE = 2


def stokes_dofmap(problem: StokesProblem) -> DofMap:
    return DofMap(problem.mesh.n_vertices, N_FIELDS, multiplier=problem.zero_mean)


def _flatten(blocks: np.ndarray) -> np.ndarray:
    """(b, 3, 3, 3, 3) blocks indexed [a, c, b, d] to (b, 9, 9) with index 3a + c."""
    return blocks.reshape(len(blocks), 9, 9)


def _volume(problem: StokesProblem, load_quad: QuadratureRule):
    mesh = problem.mesh
    mu, gamma = problem.mu, problem.gamma
    coords = mesh.vertices[mesh.cells]
    g, area = p1_gradients(coords)
    tau = gamma * compute_metrics(mesh).h_tau ** 2 / (2.0 * mu) * area
    gg = np.einsum("nad,nbd->nab", g, g)
    third = (area / 3.0)[:, None, None]

    blocks = np.zeros((mesh.n_cells, 3, 3, 3, 3))
    for c in range(2):
        for d in range(2):
            viscous = g[:, :, d][:, :, None] * g[:, None, :, c]
            if c == d:
                viscous = viscous + gg
            blocks[:, :, c, :, d] = mu * area[:, None, None] * viscous
        # -(p, div w) and (div u, q)
        blocks[:, :, c, :, PRESSURE] = -third * g[:, :, c][:, :, None]
        blocks[:, :, PRESSURE, :, c] = third * g[:, None, :, c]
    blocks[:, :, PRESSURE, :, PRESSURE] = tau[:, None, None] * gg

    pts = map_points(coords, load_quad.points)
    f = problem.forcing(pts.reshape(-1, 2)).reshape(*pts.shape[:2], 2)
    loads = np.zeros((mesh.n_cells, 3, 3))
    for c in range(2):
        loads[:, :, c] = area[:, None] * np.einsum(
            "q,nq,qa->na", load_quad.weights, f[..., c], load_quad.points
        )
    loads[:, :, PRESSURE] = tau[:, None] * np.einsum("q,nqd,nad->na", load_quad.weights, f, g)
    return _flatten(blocks), loads.reshape(mesh.n_cells, 9)


def _dirichlet(problem: StokesProblem, batch: EdgeBatch, grads: np.ndarray):
    mu, alpha = problem.mu, problem.alpha
    g = grads[batch.cells]
    phi = edge_shape_values(batch.params, batch.local_edges)
    shifted = eval_shifted(phi, g, batch.distance_vectors)
    n = batch.normals
    gn = np.einsum("kid,kd->ki", g, n)
    w = batch.weights
    penalty = 2.0 * alpha * mu / batch.h_perp

    w_phi = np.einsum("kq,kqa->ka", w, phi)
    w_s = np.einsum("kq,kqa->ka", w, shifted)
    ss = np.einsum("kq,kqa,kqb->kab", w, shifted, shifted)
    pp = np.einsum("kq,kqa,kqb->kab", w, phi, phi)
    ps = np.einsum("kq,kqa,kqb->kab", w, phi, shifted)

    blocks = np.zeros((batch.size, 3, 3, 3, 3))
    for c in range(2):
        for d in range(2):
            # -<2 mu eps(u) n, w>
            trial = g[:, None, :, c] * n[:, d, None, None]
            # -<S_h u, 2 mu eps(w) n>
            test = g[:, :, d][:, :, None] * n[:, c, None, None]
            if c == d:
                trial = trial + gn[:, None, :]
                test = test + gn[:, :, None]
                blocks[:, :, c, :, d] += penalty[:, None, None] * ss
            blocks[:, :, c, :, d] -= mu * (w_phi[:, :, None] * trial + test * w_s[:, None, :])
        # <p, w . n> and -<S_h u . n, q>
        blocks[:, :, c, :, PRESSURE] = n[:, c, None, None] * pp
        blocks[:, :, PRESSURE, :, c] = -n[:, c, None, None] * ps

    u_bar = problem.dirichlet(batch.targets.reshape(-1, 2)).reshape(*w.shape, 2)
    loads = np.zeros((batch.size, 3, 3))
    gu = np.einsum("kq,kqd,kad->ka", w, u_bar, g)
    for c in range(2):
        wu = w * u_bar[..., c]
        loads[:, :, c] = (
            -mu * (wu.sum(axis=1)[:, None] * gn + gu * n[:, c, None])
            + penalty[:, None] * np.einsum("kq,kqa->ka", wu, shifted)
        )
    un = np.einsum("kqd,kd->kq", u_bar, n)
    loads[:, :, PRESSURE] = -np.einsum("kq,kq,kqa->ka", w, un, phi)
    return _flatten(blocks), loads.reshape(batch.size, 9)


def _neumann(problem: StokesProblem, batch: EdgeBatch) -> np.ndarray:
    w = batch.weights
    phi = edge_shape_values(batch.params, batch.local_edges)
    normals = np.broadcast_to(batch.normals[:, None, :], batch.points.shape)
    t = problem.traction(batch.points.reshape(-1, 2), normals.reshape(-1, 2))
    t = t.reshape(*w.shape, 2)
    loads = np.zeros((batch.size, 3, 3))
    for c in range(2):
        loads[:, :, c] = np.einsum("kq,kq,kqa->ka", w, t[..., c], phi)
    return loads.reshape(batch.size, 9)


def pressure_mass(problem: StokesProblem) -> np.ndarray:
    """Integral of every pressure basis function over the surrogate domain."""
    mesh = problem.mesh
    share = np.repeat(np.abs(mesh.areas) / 3.0, 3)
    return np.bincount(mesh.cells.ravel(), weights=share, minlength=mesh.n_vertices)


def assemble_stokes(
    problem: StokesProblem, load_quad: QuadratureRule | None = None
) -> SparseSystem:
    """
    Assemble the stabilized P1-P1 shifted-boundary Stokes system.

    Unknowns are interleaved (u_x, u_y, p) per vertex, followed by the
    zero-mean multiplier when the gauge requires it. Momentum rows carry
    2 mu (eps(u), eps(w)) - (p, div w) with the Nitsche terms on Dirichlet
    edges, penalty 2 alpha mu / h_perp on S_h u and S_h w, and <p, w . n>.
    Continuity rows carry (div u, q) - <S_h u . n, q> plus the stabilization
    gamma h_tau^2 / (2 mu) (grad p - f, grad q). For P1 the divergence of the
    discrete viscous stress vanishes cellwise, so it does not appear.

    Args:
        problem: The Stokes problem.
        load_quad: Cell rule for the forcing; degree 4 by default.

    Returns:
        The assembled system.
    """
    mesh = problem.mesh
    load_quad = load_quad or cell_rule(4)
    dofmap = stokes_dofmap(problem)
    assembler = Assembler(dofmap)

    matrices, loads = _volume(problem, load_quad)
    assembler.add(
        LocalContribution(rows=dofmap.cell_dofs(mesh.cells), matrices=matrices, vectors=loads)
    )

    grads, _ = p1_gradients(mesh.vertices[mesh.cells])
    batch = EdgeBatch.from_records(problem.edge_data)
    dirichlet = batch.select(batch.dirichlet)
    if dirichlet.size:
        matrices, loads = _dirichlet(problem, dirichlet, grads)
        assembler.add(
            LocalContribution(
                rows=dofmap.cell_dofs(mesh.cells[dirichlet.cells]),
                matrices=matrices,
                vectors=loads,
            )
        )
    neumann = batch.select(~batch.dirichlet)
    if neumann.size:
        assembler.add(
            LocalContribution(
                rows=dofmap.cell_dofs(mesh.cells[neumann.cells]), vectors=_neumann(problem, neumann)
            )
        )

    if problem.zero_mean:
        mass = pressure_mass(problem)
        p_dofs = dofmap.index(np.arange(mesh.n_vertices), PRESSURE)
        m_dof = np.full(mesh.n_vertices, dofmap.multiplier_dof)
        assembler.add_triplets(m_dof, p_dofs, mass)
        assembler.add_triplets(p_dofs, m_dof, mass)

    system = assembler.finalize(
        alpha=problem.alpha, gamma=problem.gamma, mu=problem.mu, zero_mean=problem.zero_mean
    )
    logger.info(
        f"Assembled Stokes system: {dofmap.n_dofs} dofs, {system.matrix.nnz} nonzeros, "
        f"{dirichlet.size} Dirichlet / {neumann.size} Neumann edges, "
        f"gauge {'zero-mean' if problem.zero_mean else 'neumann'}"
    )
    return system
