"""Benchmark geometry and per-level mesh construction shared by the ladder, audit and probes."""

import logging
from dataclasses import dataclass

from fem.quadrature import QuadratureRule, edge_rule
from geometry.boundary import EdgeBoundaryData, NormalAudit, audit_normals, build_edge_data
from geometry.domain import BoundaryTag, DomainGeometry
from mesh.grid import (
    BoundingBox,
    Mesh,
    Orientation,
    build_background_grid,
    grid_for_mesh_size,
)
from mesh.metrics import ElementMetrics, compute_metrics
from mesh.surrogate import extract_surrogate

logger = logging.getLogger(__name__)

DEFAULT_MARGIN = 0.0
DEFAULT_ASPECT = 5.0
REFERENCE_LEVELS = (4e-2, 2e-2, 1e-2, 5e-3, 2.5e-3, 1.25e-3)


def trapezoid_geometry(neumann_left: bool = False) -> DomainGeometry:
    """Benchmark right trapezoid; the left leg is Neumann for the Stokes runs."""
    left = BoundaryTag.NEUMANN if neumann_left else BoundaryTag.DIRICHLET
    return DomainGeometry.trapezoid(left_tag=left)


def background_box(geom: DomainGeometry, margin: float = DEFAULT_MARGIN) -> BoundingBox:
    """Bounding box of ``geom`` widened by ``margin`` on its right side only."""
    box = geom.bounding_box()
    return BoundingBox(box.xmin, box.ymin, box.xmax + margin, box.ymax)


@dataclass(frozen=True, eq=False)
class BenchmarkLevel:
    """Everything one ladder level needs: grids, metrics, boundary data and audit."""

    mesh_size: float
    background: Mesh
    surrogate: Mesh
    metrics: ElementMetrics
    edge_data: list[EdgeBoundaryData]
    audit: NormalAudit


def build_level(
    geom: DomainGeometry,
    mesh_size: float,
    aspect: float = DEFAULT_ASPECT,
    orientation: Orientation = Orientation.WIDE,
    margin: float = DEFAULT_MARGIN,
    quad: QuadratureRule | None = None,
) -> BenchmarkLevel:
    """
    Build the background grid at ``mesh_size``, extract the surrogate and map its boundary.

    Args:
        geom: True domain.
        mesh_size: Square root of one background rectangle area.
        aspect: Long over short rectangle side.
        orientation: Long-side axis.
        margin: Extra width of the background box beyond the domain's right side.
        quad: Edge rule for the boundary data; 3-point Gauss by default.
    """
    box, n_long = grid_for_mesh_size(background_box(geom, margin), mesh_size, aspect, orientation)
    background = build_background_grid(box, n_long, aspect, orientation)
    surrogate = extract_surrogate(background, geom)
    metrics = compute_metrics(surrogate)
    edge_data = build_edge_data(geom, surrogate, quad or edge_rule(3), metrics)
    audit = audit_normals(edge_data)
    logger.info(
        f"Level h={mesh_size:.2e}: {surrogate.n_cells}/{background.n_cells} cells kept, "
        f"{len(edge_data)} surrogate edges, {audit.violating_count} violating"
    )
    return BenchmarkLevel(
        mesh_size=mesh_size,
        background=background,
        surrogate=surrogate,
        metrics=metrics,
        edge_data=edge_data,
        audit=audit,
    )
