"""P1 Lagrange shape functions on triangles."""

import numpy as np

from mesh.grid import MeshError


def p1_gradients(coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Constant gradients of the three barycentric shape functions of each cell.

    Args:
        coords: (n, 3, 2) counterclockwise cell vertex coordinates.

    Returns:
        Tuple of (gradients (n, 3, 2), signed areas (n,)).

    Raises:
        MeshError: If a cell has zero area.
    """
    coords = np.asarray(coords, dtype=float)
    x = coords[..., 0]
    y = coords[..., 1]
    area = 0.5 * ((x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0]))
    if np.any(area == 0.0):
        raise MeshError(f"Zero-area cell {int(np.argmin(np.abs(area)))}")

    grads = np.empty_like(coords)
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        grads[:, i, 0] = y[:, j] - y[:, k]
        grads[:, i, 1] = x[:, k] - x[:, j]
    grads /= (2.0 * area)[:, None, None]
    return grads, area


def shape_p1(coords: np.ndarray, bary: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Values and gradients of the P1 basis on a single cell.

    Args:
        coords: (3, 2) vertex coordinates.
        bary: (q, 3) barycentric evaluation points.

    Returns:
        Tuple of (values (q, 3), gradients (3, 2)).
    """
    grads, _ = p1_gradients(np.asarray(coords, dtype=float)[None])
    return np.array(bary, dtype=float), grads[0]


def map_points(coords: np.ndarray, bary: np.ndarray) -> np.ndarray:
    """Physical images (n, q, 2) of barycentric points (q, 3) on cells (n, 3, 2)."""
    return np.einsum("qk,nkd->nqd", bary, coords)


def edge_shape_values(params: np.ndarray, local_edges) -> np.ndarray:
    """
    Values of the three cell basis functions at points along local edges.

    Local edge ``e`` runs from cell vertex ``e`` to vertex ``(e + 1) % 3``; the
    point at parameter s has barycentric weight 1 - s on the first and s on the
    second.

    Args:
        params: (q,) edge parameters in [0, 1].
        local_edges: A local edge index, or (k,) indices.

    Returns:
        (q, 3) for a single edge, (k, q, 3) for an array of edges.
    """
    params = np.asarray(params, dtype=float)
    local = np.atleast_1d(np.asarray(local_edges, dtype=np.int64))
    values = np.zeros((len(local), len(params), 3))
    rows = np.arange(len(local))
    values[rows, :, local] = 1.0 - params
    values[rows, :, (local + 1) % 3] = params
    if np.ndim(local_edges) == 0:
        return values[0]
    return values
