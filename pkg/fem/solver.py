"""Direct and iterative solution of assembled systems."""

import logging
import math
from enum import Enum

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from fem.assembly import SparseSystem

logger = logging.getLogger(__name__)

# Direct solves whose relative residual exceeds this are reported.
RESIDUAL_WARN = 1e-10
REFINEMENT_STEPS = 2


class SolverError(Exception):
    """Raised when a linear solve fails or does not converge."""

    pass


class SolveMethod(Enum):
    """Linear solver choice."""

    DIRECT = "direct"
    GMRES = "gmres"


def _jacobi(system: SparseSystem) -> spla.LinearOperator:
    diag = system.matrix.diagonal()
    inv = np.ones_like(diag)
    nonzero = diag != 0.0
    inv[nonzero] = 1.0 / diag[nonzero]
    n = len(diag)
    return spla.LinearOperator((n, n), matvec=lambda x: inv * x, dtype=float)


def _equilibrate(system: SparseSystem) -> np.ndarray:
    """Symmetric scaling 1/sqrt(max |a_ij|) per row; all-zero rows keep scale one."""
    row_max = np.asarray(abs(system.matrix).max(axis=1).toarray()).ravel()
    scale = np.ones_like(row_max)
    nonzero = row_max > 0.0
    scale[nonzero] = 1.0 / np.sqrt(row_max[nonzero])
    return scale


def _direct(system: SparseSystem, refinement_steps: int) -> np.ndarray:
    n = system.shape[0]
    s = _equilibrate(system)
    scaled = sp.diags(s) @ system.matrix @ sp.diags(s)
    try:
        lu = spla.splu(sp.csc_matrix(scaled))
    except RuntimeError as e:
        raise SolverError(f"Sparse LU failed on {n}x{n} system: {e}") from e
    x = s * lu.solve(s * system.rhs)
    for step in range(refinement_steps):
        r = system.rhs - system.matrix @ x
        if not np.all(np.isfinite(r)) or not r.any():
            break
        x = x + s * lu.solve(s * r)
        logger.debug(f"Refinement step {step + 1}: residual {system.residual(x):.3e}")
    return x


def solve(
    system: SparseSystem,
    method: SolveMethod = SolveMethod.DIRECT,
    rtol: float = 1e-12,
    restart: int = 200,
    max_iterations: int = 10_000,
    refinement_steps: int = REFINEMENT_STEPS,
) -> np.ndarray:
    """
    Solve ``system.matrix @ x = system.rhs``.

    The direct path equilibrates rows and columns symmetrically, factors the
    scaled matrix with sparse LU and applies a few steps of iterative
    refinement against the unscaled system. The iterative path is restarted
    GMRES with a Jacobi preconditioner and stops on the relative
    residual ``rtol``.

    Args:
        system: Square assembled system.
        method: Direct LU or GMRES.
        rtol: GMRES stopping tolerance on ||Ax - b|| / ||b||.
        restart: GMRES restart length.
        max_iterations: Total GMRES iteration budget.
        refinement_steps: Iterative refinement steps after the direct solve.

    Returns:
        The solution vector.

    Raises:
        SolverError: If the matrix is singular, the solution is not finite, or
            GMRES does not converge within ``max_iterations``.
    """
    n, m = system.shape
    if n != m:
        raise SolverError(f"System matrix is not square ({n}x{m})")
    if n == 0:
        return np.zeros(0)

    if method is SolveMethod.DIRECT:
        x = _direct(system, refinement_steps)
    else:
        iterations = 0

        def count(_):
            nonlocal iterations
            iterations += 1

        restart = min(restart, n)
        x, info = spla.gmres(
            system.matrix,
            system.rhs,
            rtol=rtol,
            atol=0.0,
            restart=restart,
            maxiter=math.ceil(max_iterations / restart),
            M=_jacobi(system),
            callback=count,
            callback_type="pr_norm",
        )
        if info != 0:
            raise SolverError(
                f"GMRES did not converge in {iterations} iterations "
                f"(residual {system.residual(x):.3e}, target {rtol:.1e})"
            )
        logger.debug(f"GMRES converged in {iterations} iterations")

    if not np.all(np.isfinite(x)):
        raise SolverError(f"Solution of {n}x{n} system is not finite; matrix likely singular")

    residual = system.residual(x)
    if residual > RESIDUAL_WARN:
        logger.warning(f"{method.value} solve residual {residual:.3e} above {RESIDUAL_WARN:.0e}")
    logger.info(f"Solved {n}x{n} system ({method.value}), residual {residual:.3e}")
    return x
