"""Background grids, surrogate extraction and element metrics."""

from mesh.grid import (
    BoundingBox,
    Mesh,
    MeshError,
    Orientation,
    build_background_grid,
    grid_for_mesh_size,
)
from mesh.io import write_text_dump, write_vtk
from mesh.metrics import ElementMetrics, compute_metrics
from mesh.surrogate import extract_surrogate

__all__ = [
    "BoundingBox",
    "ElementMetrics",
    "Mesh",
    "MeshError",
    "Orientation",
    "build_background_grid",
    "compute_metrics",
    "extract_surrogate",
    "grid_for_mesh_size",
    "write_text_dump",
    "write_vtk",
]
