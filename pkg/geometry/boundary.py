"""Surrogate-boundary data: distance vectors, Dirichlet/Neumann classification, normal audit."""

import logging
from collections import Counter
from dataclasses import dataclass

import numpy as np

from fem.quadrature import QuadratureRule, RuleKind, edge_rule
from geometry.domain import BoundaryTag, DomainGeometry, GeometryError
from mesh.grid import Mesh
from mesh.metrics import ElementMetrics, compute_metrics

logger = logging.getLogger(__name__)

# Distance vectors shorter than this multiple of l(Omega) are treated as zero.
ZERO_DISTANCE_TOL = 1e-12
# Unit-vector dot products within this of zero count as orthogonal.
ORTHOGONAL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class EdgeBoundaryData:
    """
    Geometry of one surrogate boundary edge and of its map onto the true boundary.

    Attributes:
        edge_id: Index into ``Mesh.boundary_edges``.
        cell: Owning cell.
        local_edge: Local edge index within the cell.
        vertices: The two mesh vertex indices (a, b) in cell order.
        normal: Outward unit normal of the surrogate edge.
        length: Edge length.
        tag: Dirichlet or Neumann classification.
        params: (q,) position of each quadrature point along a -> b.
        points: (q, 2) quadrature points on the surrogate edge.
        weights: (q,) quadrature weights including the edge length.
        distance_vectors: (q, 2) d = M_h(x) - x, zeroed below the zero threshold.
        nu: (q, 2) unit vectors d / |d|; zero rows where ``zero`` is set.
        zero: (q,) flags for vanishing distance vectors.
        segments: (q,) boundary segment each point projects onto.
        segment_tags: Tag of each of those segments.
        true_normals: (q, 2) true-boundary normal at each projected point.
        h_T: Circumscribed diameter of the owning cell.
        h_perp: Owning-cell area over edge length.
    """

    edge_id: int
    cell: int
    local_edge: int
    vertices: tuple[int, int]
    normal: np.ndarray
    length: float
    tag: BoundaryTag
    params: np.ndarray
    points: np.ndarray
    weights: np.ndarray
    distance_vectors: np.ndarray
    nu: np.ndarray
    zero: np.ndarray
    segments: np.ndarray
    segment_tags: tuple[BoundaryTag, ...]
    true_normals: np.ndarray
    h_T: float
    h_perp: float

    @property
    def targets(self) -> np.ndarray:
        """Images x + d of the quadrature points on the true boundary."""
        return self.points + self.distance_vectors

    @property
    def is_fitted(self) -> bool:
        return bool(self.zero.all())

    @property
    def is_dirichlet(self) -> bool:
        return self.tag is BoundaryTag.DIRICHLET


@dataclass(frozen=True)
class NormalAudit:
    """Geometric-resolution diagnostics of a surrogate boundary."""

    violating_count: int
    total_count: int
    misaligned_count: int
    max_d_over_h: float
    orthogonal_count: int = 0

    @property
    def percentage(self) -> float:
        if self.total_count == 0:
            return 0.0
        return 100.0 * self.violating_count / self.total_count


@dataclass(frozen=True, eq=False)
class EdgeBatch:
    """
    Edge records stacked into arrays for vectorized boundary integrals.

    All records must share one quadrature rule. Leading axis k runs over edges,
    q over quadrature points.
    """

    edge_ids: np.ndarray
    cells: np.ndarray
    local_edges: np.ndarray
    normals: np.ndarray
    params: np.ndarray
    points: np.ndarray
    weights: np.ndarray
    distance_vectors: np.ndarray
    h_perp: np.ndarray
    dirichlet: np.ndarray

    @classmethod
    def from_records(cls, records: list[EdgeBoundaryData]) -> "EdgeBatch":
        if not records:
            raise GeometryError("Cannot batch an empty edge list")
        sizes = {len(r.weights) for r in records}
        if len(sizes) != 1:
            raise GeometryError(f"Edge records use different quadrature sizes {sorted(sizes)}")
        return cls(
            edge_ids=np.array([r.edge_id for r in records]),
            cells=np.array([r.cell for r in records]),
            local_edges=np.array([r.local_edge for r in records]),
            normals=np.array([r.normal for r in records]),
            params=records[0].params,
            points=np.array([r.points for r in records]),
            weights=np.array([r.weights for r in records]),
            distance_vectors=np.array([r.distance_vectors for r in records]),
            h_perp=np.array([r.h_perp for r in records]),
            dirichlet=np.array([r.is_dirichlet for r in records]),
        )

    @property
    def size(self) -> int:
        return len(self.cells)

    @property
    def targets(self) -> np.ndarray:
        return self.points + self.distance_vectors

    def select(self, mask: np.ndarray) -> "EdgeBatch":
        """Sub-batch of the edges where ``mask`` is set."""
        return EdgeBatch(
            edge_ids=self.edge_ids[mask],
            cells=self.cells[mask],
            local_edges=self.local_edges[mask],
            normals=self.normals[mask],
            params=self.params,
            points=self.points[mask],
            weights=self.weights[mask],
            distance_vectors=self.distance_vectors[mask],
            h_perp=self.h_perp[mask],
            dirichlet=self.dirichlet[mask],
        )


def _classify(edge_id: int, point_tags: list[BoundaryTag]) -> BoundaryTag:
    counts = Counter(point_tags)
    if len(counts) == 1:
        return point_tags[0]
    n_dirichlet = counts[BoundaryTag.DIRICHLET]
    n_neumann = counts[BoundaryTag.NEUMANN]
    tag = BoundaryTag.DIRICHLET if n_dirichlet >= n_neumann else BoundaryTag.NEUMANN
    logger.warning(
        f"Surrogate edge {edge_id} projects onto both Dirichlet ({n_dirichlet}) and "
        f"Neumann ({n_neumann}) segments; classified {tag.value} by majority"
    )
    return tag


def build_edge_data(
    geom: DomainGeometry,
    surrogate: Mesh,
    quad: QuadratureRule | None = None,
    metrics: ElementMetrics | None = None,
) -> list[EdgeBoundaryData]:
    """
    Map every surrogate boundary edge onto the true boundary.

    At each quadrature point x the closest-point projection gives
    d = M_h(x) - x. An edge is Dirichlet iff all its points project onto
    Dirichlet segments and Neumann iff all project onto Neumann segments; mixed
    edges are decided by majority (ties to Dirichlet) with a warning.

    Args:
        geom: True domain.
        surrogate: Surrogate mesh.
        quad: Edge rule; 3-point Gauss by default.
        metrics: Precomputed metrics of ``surrogate``.

    Returns:
        One record per surrogate boundary edge, in ``boundary_edges`` order.

    Raises:
        GeometryError: If the surrogate has no boundary edges or ``quad`` is not
            an edge rule.
    """
    quad = quad or edge_rule(3)
    if quad.kind is not RuleKind.EDGE:
        raise GeometryError("build_edge_data needs an edge quadrature rule")
    if len(surrogate.boundary_edges) == 0:
        raise GeometryError("Surrogate mesh has no boundary edges")
    metrics = metrics or compute_metrics(surrogate)

    ab = surrogate.boundary_edge_vertices
    a = surrogate.vertices[ab[:, 0]]
    b = surrogate.vertices[ab[:, 1]]
    n_edges, n_q = len(ab), quad.size
    points = a[:, None, :] + quad.points[None, :, None] * (b - a)[:, None, :]

    flat = points.reshape(-1, 2)
    projection = geom.project(flat)
    d = projection.points - flat
    dist = np.linalg.norm(d, axis=1)
    zero = dist < ZERO_DISTANCE_TOL * geom.length_scale
    d[zero] = 0.0
    nu = np.zeros_like(d)
    nu[~zero] = d[~zero] / dist[~zero, None]
    true_normals = geom.boundary_normals_at(projection)

    d = d.reshape(n_edges, n_q, 2)
    nu = nu.reshape(n_edges, n_q, 2)
    zero = zero.reshape(n_edges, n_q)
    segments = projection.segments.reshape(n_edges, n_q)
    true_normals = true_normals.reshape(n_edges, n_q, 2)

    lengths = surrogate.boundary_lengths
    normals = surrogate.boundary_normals
    records = []
    for e in range(n_edges):
        point_tags = [geom.tags[s] for s in segments[e]]
        records.append(
            EdgeBoundaryData(
                edge_id=e,
                cell=int(surrogate.boundary_edges[e, 0]),
                local_edge=int(surrogate.boundary_edges[e, 1]),
                vertices=(int(ab[e, 0]), int(ab[e, 1])),
                normal=normals[e],
                length=float(lengths[e]),
                tag=_classify(e, point_tags),
                params=quad.points,
                points=points[e],
                weights=quad.weights * lengths[e],
                distance_vectors=d[e],
                nu=nu[e],
                zero=zero[e],
                segments=segments[e],
                segment_tags=tuple(point_tags),
                true_normals=true_normals[e],
                h_T=float(metrics.h_T[surrogate.boundary_edges[e, 0]]),
                h_perp=float(metrics.h_perp[e]),
            )
        )

    n_neumann = sum(1 for r in records if r.tag is BoundaryTag.NEUMANN)
    logger.info(
        f"Built boundary data for {n_edges} surrogate edges "
        f"({n_edges - n_neumann} Dirichlet, {n_neumann} Neumann), max |d| {dist.max():.3e}"
    )
    return records


def audit_normals(edge_data: list[EdgeBoundaryData]) -> NormalAudit:
    """
    Count surrogate edges that violate the geometric resolution condition.

    An edge violates it when nu . n_tilde <= 0, up to ORTHOGONAL_TOL, at any of
    its quadrature points with nonzero d; edges with d = 0 everywhere never violate. Violating edges
    whose worst point has |nu . n_tilde| <= ORTHOGONAL_TOL are also counted as
    orthogonal. The count of edges whose true normal n satisfies
    n . n_tilde <= 0 at such a point and the largest |d| / h_T are reported
    alongside. Nothing here is enforced.
    """
    violating = 0
    orthogonal = 0
    misaligned = 0
    max_ratio = 0.0
    for record in edge_data:
        active = ~record.zero
        if not active.any():
            continue
        worst = float((record.nu[active] @ record.normal).min())
        if worst <= ORTHOGONAL_TOL:
            violating += 1
            if worst >= -ORTHOGONAL_TOL:
                orthogonal += 1
        if np.any(record.true_normals[active] @ record.normal <= 0.0):
            misaligned += 1
        dist = np.linalg.norm(record.distance_vectors, axis=1).max()
        max_ratio = max(max_ratio, float(dist / record.h_T))

    audit = NormalAudit(
        violating_count=violating,
        total_count=len(edge_data),
        misaligned_count=misaligned,
        max_d_over_h=max_ratio,
        orthogonal_count=orthogonal,
    )
    logger.info(
        f"Normal audit: {audit.violating_count}/{audit.total_count} edges with nu.n <= 0 "
        f"({audit.percentage:.2f}%, {audit.orthogonal_count} orthogonal), "
        f"max |d|/h_T {audit.max_d_over_h:.3f}"
    )
    return audit


def surrogate_geometry(surrogate: Mesh, edge_data: list[EdgeBoundaryData]) -> DomainGeometry:
    """
    The surrogate boundary as a true boundary (Gamma = surrogate Gamma), with each
    segment keeping the tag of its edge.

    This is the body-fitted limit of the method: building edge data against it
    yields d = 0 everywhere.

    Raises:
        GeometryError: If the surrogate boundary is not a single closed loop.
    """
    ab = surrogate.boundary_edge_vertices
    by_start = {int(a): e for e, a in enumerate(ab[:, 0])}
    if len(by_start) != len(ab):
        raise GeometryError("Surrogate boundary touches itself at a vertex")

    order = [0]
    while True:
        nxt = by_start[int(ab[order[-1], 1])]
        if nxt == order[0]:
            break
        order.append(nxt)
    if len(order) != len(ab):
        raise GeometryError(
            f"Surrogate boundary has several loops ({len(order)} of {len(ab)} edges in the first)"
        )

    tags = {r.edge_id: r.tag for r in edge_data}
    vertices = surrogate.vertices[ab[order, 0]]
    return DomainGeometry.from_vertices(vertices, [tags[e] for e in order])
