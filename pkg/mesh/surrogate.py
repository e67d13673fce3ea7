"""Restriction of a background grid to the cells contained in the true domain."""

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from mesh.grid import Mesh, MeshError

if TYPE_CHECKING:
    from geometry.domain import DomainGeometry

logger = logging.getLogger(__name__)

# Inside-test tolerance relative to l(bbox) of the background grid.
RELATIVE_INSIDE_TOL = 1e-12


def submesh(mesh: Mesh, keep: np.ndarray) -> Mesh:
    """
    Restrict a mesh to the selected cells, renumbering vertices in original order.

    Args:
        mesh: Source mesh.
        keep: Boolean mask over cells.

    Returns:
        The restricted mesh.
    """
    cells = mesh.cells[keep]
    used = np.unique(cells)
    remap = np.full(mesh.n_vertices, -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    return Mesh.from_arrays(mesh.vertices[used], remap[cells])


def count_components(mesh: Mesh) -> int:
    """Number of edge-connected components of the cells of a mesh."""
    pairs = mesh.interior_cell_pairs
    graph = coo_matrix(
        (np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])),
        shape=(mesh.n_cells, mesh.n_cells),
    )
    n_components, _ = connected_components(graph, directed=False)
    return int(n_components)


def extract_surrogate(
    mesh: Mesh, geom: "DomainGeometry", tol: float | None = None
) -> Mesh:
    """
    Select the cells whose three vertices and centroid lie in clos(Omega).

    Args:
        mesh: Background mesh.
        geom: True domain.
        tol: Inside-test tolerance; defaults to 1e-12 * l(bbox of ``mesh``).

    Returns:
        The surrogate mesh, with its boundary recomputed.

    Raises:
        MeshError: If ``tol`` is negative, no cell is inside, or the selected
            cells are not edge-connected.
    """
    if tol is None:
        tol = RELATIVE_INSIDE_TOL * mesh.bounding_box().length_scale
    if tol < 0.0:
        raise MeshError(f"Inside tolerance must be >= 0, got {tol}")

    inside_vertex = geom.contains(mesh.vertices, tol)
    inside_centroid = geom.contains(mesh.centroids, tol)
    keep = inside_vertex[mesh.cells].all(axis=1) & inside_centroid

    if not keep.any():
        raise MeshError("Empty surrogate: no background cell lies inside the domain")

    surrogate = submesh(mesh, keep)
    n_components = count_components(surrogate)
    if n_components != 1:
        raise MeshError(f"Disconnected surrogate domain with {n_components} components")

    logger.info(
        f"Extracted surrogate: {surrogate.n_cells}/{mesh.n_cells} cells, "
        f"{len(surrogate.boundary_edges)} boundary edges, area {surrogate.total_area:.6f}"
    )
    return surrogate
