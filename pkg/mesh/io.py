"""Mesh export: legacy-VTK ASCII through meshio, and a plain-text node/element dump."""

import logging
from pathlib import Path

import meshio
import numpy as np

from mesh.grid import Mesh

logger = logging.getLogger(__name__)


def _pad3(values: np.ndarray) -> np.ndarray:
    """VTK stores points and vectors with three components."""
    values = np.asarray(values, dtype=float)
    if values.ndim == 2 and values.shape[1] == 2:
        return np.column_stack([values, np.zeros(len(values))])
    return values


def write_vtk(
    mesh: Mesh,
    path: str | Path,
    point_data: dict[str, np.ndarray] | None = None,
    cell_data: dict[str, np.ndarray] | None = None,
) -> Path:
    """
    Write a mesh and optional fields as an ASCII legacy-VTK unstructured grid.

    Args:
        mesh: Mesh to write.
        path: Target ``.vtk`` file.
        point_data: Nodal fields; (n,) scalars or (n, 2) vectors.
        cell_data: Per-cell scalars.

    Returns:
        The written path.
    """
    out = meshio.Mesh(
        points=_pad3(mesh.vertices),
        cells=[("triangle", mesh.cells)],
        point_data={name: _pad3(values) for name, values in (point_data or {}).items()},
        cell_data={name: [np.asarray(values, dtype=float)] for name, values in (cell_data or {}).items()},
    )
    path = Path(path)
    meshio.write(path, out, file_format="vtk", binary=False)
    logger.debug(f"Wrote VTK mesh with {mesh.n_cells} cells to {path}")
    return path


def write_text_dump(mesh: Mesh, path: str | Path) -> Path:
    """
    Write a deterministic node/element listing used by golden-file comparisons.

    Format: a ``NODES n`` header, one ``x y`` row per vertex, an ``ELEMENTS m``
    header and one ``i j k`` row per cell, then ``BOUNDARY k`` and
    ``cell local`` rows.
    """
    path = Path(path)
    lines = [f"NODES {mesh.n_vertices}"]
    lines += [f"{x:.16e} {y:.16e}" for x, y in mesh.vertices]
    lines.append(f"ELEMENTS {mesh.n_cells}")
    lines += [f"{i} {j} {k}" for i, j, k in mesh.cells]
    lines.append(f"BOUNDARY {len(mesh.boundary_edges)}")
    lines += [f"{c} {e}" for c, e in mesh.boundary_edges]
    path.write_text("\n".join(lines) + "\n")
    return path
