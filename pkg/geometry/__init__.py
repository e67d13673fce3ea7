"""True-domain geometry, closest-point maps and surrogate-boundary data."""

from geometry.boundary import (
    EdgeBatch,
    EdgeBoundaryData,
    NormalAudit,
    audit_normals,
    build_edge_data,
    surrogate_geometry,
)
from geometry.domain import BoundaryTag, DomainGeometry, GeometryError, Projection

__all__ = [
    "BoundaryTag",
    "DomainGeometry",
    "EdgeBatch",
    "EdgeBoundaryData",
    "GeometryError",
    "NormalAudit",
    "Projection",
    "audit_normals",
    "build_edge_data",
    "surrogate_geometry",
]
