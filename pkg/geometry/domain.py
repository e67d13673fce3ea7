"""True-domain description: tagged polygon, inside test and closest-point projection."""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from pathlib import Path

import numpy as np
import shapely
from shapely.geometry import Polygon

from mesh.grid import BoundingBox

logger = logging.getLogger(__name__)

# Distances within this multiple of l(Omega) of the minimum count as ties.
TIE_TOL = 1e-14


class GeometryError(Exception):
    """Raised when a domain description is invalid."""

    pass


class BoundaryTag(Enum):
    """Boundary condition type carried by a boundary segment or surrogate edge."""

    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"

    @classmethod
    def parse(cls, text: str) -> "BoundaryTag":
        key = text.strip().lower()
        aliases = {"d": cls.DIRICHLET, "n": cls.NEUMANN}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError as e:
            raise GeometryError(f"Unknown boundary tag '{text}'") from e


@dataclass(frozen=True, eq=False)
class Projection:
    """
    Closest points on the boundary for a batch of query points.

    Attributes:
        points: (n, 2) closest boundary points.
        segments: (n,) index of the segment each closest point lies on.
        params: (n,) position along that segment, 0 at its start, 1 at its end.
        distances: (n,) Euclidean distances, all >= 0.
    """

    points: np.ndarray
    segments: np.ndarray
    params: np.ndarray
    distances: np.ndarray


@dataclass(frozen=True, eq=False)
class DomainGeometry:
    """
    Simple polygon with counterclockwise vertices and one tag per segment.

    Segment i runs from ``vertices[i]`` to ``vertices[i + 1]`` (cyclically) and
    carries ``tags[i]``. Use :meth:`from_vertices` to validate and orient input.
    """

    vertices: np.ndarray
    tags: tuple[BoundaryTag, ...]

    @classmethod
    def from_vertices(
        cls, vertices: np.ndarray, tags: list[BoundaryTag] | tuple[BoundaryTag, ...]
    ) -> "DomainGeometry":
        """
        Validate a polygon, reorienting clockwise input to counterclockwise.

        Args:
            vertices: (n, 2) polygon vertices without the closing repeat.
            tags: One tag per outgoing segment.

        Raises:
            GeometryError: If there are fewer than three vertices, the tag count
                does not match, or the polygon is not simple.
        """
        vertices = np.asarray(vertices, dtype=float).reshape(-1, 2)
        tags = tuple(tags)
        if len(vertices) < 3:
            raise GeometryError(f"Polygon needs at least 3 vertices, got {len(vertices)}")
        if len(tags) != len(vertices):
            raise GeometryError(f"Expected {len(vertices)} segment tags, got {len(tags)}")

        polygon = Polygon(vertices)
        if not polygon.is_valid or polygon.area <= 0.0:
            raise GeometryError("Boundary polygon is not simple")

        x, y = vertices[:, 0], vertices[:, 1]
        signed = 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
        if signed < 0.0:
            n = len(vertices)
            vertices = vertices[::-1].copy()
            tags = tuple(tags[(n - 2 - j) % n] for j in range(n))
            logger.debug("Reoriented clockwise polygon to counterclockwise")

        return cls(vertices=vertices, tags=tags)

    @classmethod
    def from_file(cls, path: str | Path) -> "DomainGeometry":
        """
        Read a polygon file with one ``x y tag`` row per vertex.

        The tag applies to the segment leaving that vertex. Blank lines and
        lines starting with ``#`` are ignored.
        """
        rows = []
        tags = []
        for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise GeometryError(f"{path}:{lineno}: expected 'x y tag', got '{line}'")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError as e:
                raise GeometryError(f"{path}:{lineno}: invalid coordinate") from e
            tags.append(BoundaryTag.parse(parts[2]))
        return cls.from_vertices(np.array(rows), tags)

    @classmethod
    def rectangle(
        cls, bbox: BoundingBox, tags: list[BoundaryTag] | None = None
    ) -> "DomainGeometry":
        """Rectangle with segments bottom, right, top, left; all Dirichlet by default."""
        return cls.from_vertices(bbox.corners(), tags or [BoundaryTag.DIRICHLET] * 4)

    @classmethod
    def trapezoid(
        cls,
        height: float = 1.0,
        top: float = 0.6,
        bottom: float = 0.4,
        left_tag: BoundaryTag = BoundaryTag.DIRICHLET,
    ) -> "DomainGeometry":
        """
        Right trapezoid with its left leg on x = 0 and bottom base on y = 0.

        Segments: bottom (0,0)-(bottom,0), slanted side (bottom,0)-(top,height),
        top (top,height)-(0,height), left leg (0,height)-(0,0) tagged ``left_tag``.
        """
        vertices = np.array([[0.0, 0.0], [bottom, 0.0], [top, height], [0.0, height]])
        d = BoundaryTag.DIRICHLET
        return cls.from_vertices(vertices, [d, d, d, left_tag])

    @property
    def n_segments(self) -> int:
        return len(self.vertices)

    @cached_property
    def starts(self) -> np.ndarray:
        return self.vertices

    @cached_property
    def ends(self) -> np.ndarray:
        return np.roll(self.vertices, -1, axis=0)

    @cached_property
    def segment_normals(self) -> np.ndarray:
        """(s, 2) outward unit normals of the segments."""
        t = self.ends - self.starts
        n = np.column_stack([t[:, 1], -t[:, 0]])
        return n / np.linalg.norm(n, axis=1)[:, None]

    @cached_property
    def polygon(self) -> Polygon:
        return Polygon(self.vertices)

    @property
    def area(self) -> float:
        return float(self.polygon.area)

    @property
    def length_scale(self) -> float:
        """l(Omega) = meas(Omega)^(1/2)."""
        return math.sqrt(self.area)

    def bounding_box(self) -> BoundingBox:
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return BoundingBox(float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))

    def has_tag(self, tag: BoundaryTag) -> bool:
        return tag in self.tags

    def translated(self, dx: float, dy: float) -> "DomainGeometry":
        """Rigidly moved copy with the same tags."""
        return DomainGeometry(vertices=self.vertices + np.array([dx, dy]), tags=self.tags)

    def project(self, points: np.ndarray) -> Projection:
        """
        Closest-point projection of points onto the boundary.

        Ties (within 1e-14 * l(Omega)) go to the lowest segment index.

        Args:
            points: (n, 2) query points, or a single (2,) point.

        Returns:
            The projection of every point.
        """
        p = np.atleast_2d(np.asarray(points, dtype=float))
        a = self.starts[None, :, :]
        t = (self.ends - self.starts)[None, :, :]
        rel = p[:, None, :] - a
        s = np.clip(np.sum(rel * t, axis=2) / np.sum(t * t, axis=2), 0.0, 1.0)
        closest = a + s[:, :, None] * t
        dist = np.linalg.norm(p[:, None, :] - closest, axis=2)

        near = dist <= dist.min(axis=1, keepdims=True) + TIE_TOL * self.length_scale
        seg = np.argmax(near, axis=1)
        rows = np.arange(len(p))
        return Projection(
            points=closest[rows, seg],
            segments=seg,
            params=s[rows, seg],
            distances=dist[rows, seg],
        )

    def contains(self, points: np.ndarray, tol: float = 0.0) -> np.ndarray:
        """
        Inside test for clos(Omega), widened by ``tol``.

        Returns:
            (n,) booleans: strictly inside, or within ``tol`` of the boundary.
        """
        p = np.atleast_2d(np.asarray(points, dtype=float))
        inside = shapely.contains_xy(self.polygon, p[:, 0], p[:, 1])
        return inside | (self.project(p).distances <= tol)

    def boundary_normals_at(self, projection: Projection) -> np.ndarray:
        """
        True-boundary unit normal n at projected points.

        At a polygon corner the normals of the two segments meeting there are
        averaged and renormalized.
        """
        normals = self.segment_normals[projection.segments].copy()
        n_seg = self.n_segments
        at_start = projection.params <= 0.0
        at_end = projection.params >= 1.0
        if at_start.any():
            prev = (projection.segments[at_start] - 1) % n_seg
            normals[at_start] += self.segment_normals[prev]
        if at_end.any():
            nxt = (projection.segments[at_end] + 1) % n_seg
            normals[at_end] += self.segment_normals[nxt]
        return normals / np.linalg.norm(normals, axis=1)[:, None]
