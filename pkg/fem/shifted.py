"""The shifted boundary operator S_h v = v + grad(v) . d."""

import numpy as np


def eval_shifted(values: np.ndarray, grads: np.ndarray, d: np.ndarray) -> np.ndarray:
    """
    Apply S_h to every basis function at every point.

    For P1 the gradient is constant on the cell, so S_h phi(x) = phi(x) + grad(phi) . d(x)
    is the value of phi at x + d. Vector fields are shifted componentwise with
    the same call. Leading batch axes (one per edge) are broadcast.

    Args:
        values: (..., q, k) basis values at q points, or (k,) at one point.
        grads: (..., k, 2) constant basis gradients.
        d: (..., q, 2) distance vectors, or (2,).

    Returns:
        Array shaped like ``values``.
    """
    grads = np.asarray(grads, dtype=float)
    return np.asarray(values, dtype=float) + np.asarray(d, dtype=float) @ np.swapaxes(grads, -1, -2)
