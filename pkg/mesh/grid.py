"""Triangular meshes and the four-triangle split Cartesian background grids."""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

logger = logging.getLogger(__name__)

# Local edge i joins local vertices LOCAL_EDGES[i]; counterclockwise cells make
# the outward normal of (a, b) equal to rot(b - a, -90 degrees).
LOCAL_EDGES = np.array([[0, 1], [1, 2], [2, 0]])

# Slack when counting how many rectangles cover an extent, so that 0.6 / 0.04
# (which is 14.999999999999998 in floating point) still gives 15.
COUNT_SLACK = 1e-9


class MeshError(Exception):
    """Raised when a mesh is invalid or cannot be built."""

    pass


class Orientation(Enum):
    """Which side of the background rectangles is the long one."""

    WIDE = "wide"  # long side along x
    TALL = "tall"  # long side along y


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned rectangle [xmin, xmax] x [ymin, ymax]."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def length_scale(self) -> float:
        """l(bbox) = meas(bbox)^(1/2)."""
        return math.sqrt(max(self.width * self.height, 0.0))

    def corners(self) -> np.ndarray:
        """Counterclockwise corners starting at (xmin, ymin)."""
        return np.array(
            [
                [self.xmin, self.ymin],
                [self.xmax, self.ymin],
                [self.xmax, self.ymax],
                [self.xmin, self.ymax],
            ]
        )


def signed_areas(vertices: np.ndarray, cells: np.ndarray) -> np.ndarray:
    """Signed area of every cell; positive for counterclockwise vertex order."""
    p0 = vertices[cells[:, 0]]
    e1 = vertices[cells[:, 1]] - p0
    e2 = vertices[cells[:, 2]] - p0
    return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])


@dataclass(frozen=True, eq=False)
class Mesh:
    """
    Conforming triangulation with counterclockwise cells.

    Attributes:
        vertices: (n, 2) vertex coordinates.
        cells: (m, 3) vertex indices, counterclockwise.
        boundary_edges: (k, 2) rows of (cell index, local edge index), sorted.

    Build instances with :meth:`from_arrays`, which validates the invariants
    and derives the boundary.
    """

    vertices: np.ndarray
    cells: np.ndarray
    boundary_edges: np.ndarray

    @classmethod
    def from_arrays(cls, vertices: np.ndarray, cells: np.ndarray) -> "Mesh":
        """
        Validate a triangulation and compute its boundary edges.

        Args:
            vertices: (n, 2) coordinates.
            cells: (m, 3) vertex indices.

        Returns:
            The validated mesh.

        Raises:
            MeshError: If a cell is degenerate or clockwise, an index is out of
                range, an edge is shared by more than two cells, or the boundary
                does not close into loops.
        """
        vertices = np.ascontiguousarray(np.asarray(vertices, dtype=float).reshape(-1, 2))
        cells = np.ascontiguousarray(np.asarray(cells, dtype=np.int64).reshape(-1, 3))

        if len(cells) == 0:
            raise MeshError("Mesh has no cells")
        if cells.min() < 0 or cells.max() >= len(vertices):
            raise MeshError(f"Cell vertex index out of range [0, {len(vertices)})")

        areas = signed_areas(vertices, cells)
        bad = np.flatnonzero(areas <= 0.0)
        if len(bad):
            raise MeshError(
                f"Cell {bad[0]} has non-positive signed area {areas[bad[0]]:.3e} "
                f"({len(bad)} degenerate or clockwise cells)"
            )

        directed = cells[:, LOCAL_EDGES].reshape(-1, 2)
        _, inverse, counts = np.unique(
            np.sort(directed, axis=1), axis=0, return_inverse=True, return_counts=True
        )
        if counts.max() > 2:
            raise MeshError("Non-manifold mesh: an edge is shared by more than two cells")

        flat = np.flatnonzero(counts[inverse.reshape(-1)] == 1)
        boundary = directed[flat]
        outgoing = np.bincount(boundary[:, 0], minlength=len(vertices))
        incoming = np.bincount(boundary[:, 1], minlength=len(vertices))
        if not np.array_equal(outgoing, incoming):
            raise MeshError("Boundary edges do not form closed loops")

        boundary_edges = np.column_stack([flat // 3, flat % 3]).astype(np.int64)
        return cls(vertices=vertices, cells=cells, boundary_edges=boundary_edges)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @cached_property
    def areas(self) -> np.ndarray:
        return signed_areas(self.vertices, self.cells)

    @property
    def total_area(self) -> float:
        return float(self.areas.sum())

    @cached_property
    def centroids(self) -> np.ndarray:
        return self.vertices[self.cells].mean(axis=1)

    @cached_property
    def boundary_edge_vertices(self) -> np.ndarray:
        """(k, 2) vertex indices (a, b) of each boundary edge, in cell order."""
        cell, local = self.boundary_edges[:, 0], self.boundary_edges[:, 1]
        return self.cells[cell[:, None], LOCAL_EDGES[local]]

    @cached_property
    def boundary_lengths(self) -> np.ndarray:
        a, b = self._boundary_points()
        return np.linalg.norm(b - a, axis=1)

    @cached_property
    def boundary_normals(self) -> np.ndarray:
        """(k, 2) outward unit normals of the boundary edges."""
        a, b = self._boundary_points()
        t = b - a
        return np.column_stack([t[:, 1], -t[:, 0]]) / self.boundary_lengths[:, None]

    @cached_property
    def boundary_midpoints(self) -> np.ndarray:
        a, b = self._boundary_points()
        return 0.5 * (a + b)

    @cached_property
    def vertex_cells(self) -> tuple[np.ndarray, ...]:
        """For every vertex, the sorted indices of the cells that contain it."""
        flat_cells = np.repeat(np.arange(self.n_cells), 3)
        flat_vertices = self.cells.reshape(-1)
        order = np.lexsort((flat_cells, flat_vertices))
        splits = np.cumsum(np.bincount(flat_vertices, minlength=self.n_vertices))[:-1]
        return tuple(np.split(flat_cells[order], splits))

    @cached_property
    def interior_cell_pairs(self) -> np.ndarray:
        """(e, 2) pairs of cells sharing an interior edge."""
        directed = self.cells[:, LOCAL_EDGES].reshape(-1, 2)
        keys = np.sort(directed, axis=1)
        order = np.lexsort((keys[:, 1], keys[:, 0]))
        sorted_keys = keys[order]
        same = np.all(sorted_keys[1:] == sorted_keys[:-1], axis=1)
        first = order[:-1][same]
        second = order[1:][same]
        return np.column_stack([first // 3, second // 3])

    def bounding_box(self) -> BoundingBox:
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return BoundingBox(float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))

    def _boundary_points(self) -> tuple[np.ndarray, np.ndarray]:
        ab = self.boundary_edge_vertices
        return self.vertices[ab[:, 0]], self.vertices[ab[:, 1]]


def _cover_count(extent: float, step: float) -> int:
    return max(1, math.ceil(extent / step - COUNT_SLACK))


def build_background_grid(
    bbox: BoundingBox,
    n_long: int,
    aspect: float = 5.0,
    orientation: Orientation = Orientation.WIDE,
) -> Mesh:
    """
    Build a Cartesian grid of rectangles, each split into four triangles.

    The bounding box is divided into ``n_long`` rectangles along the axis of the
    rectangles' long side; the short side is ``long / aspect`` and the grid is
    extended (from the lower-left corner) along the other axis until it covers
    the box. Each rectangle is split by both diagonals through an added center
    vertex, giving four equal-area triangles.

    Vertex order: rectangle corners row by row, then centers row by row.
    Cell order: rectangles row by row, each as bottom, right, top, left.

    Args:
        bbox: Region to cover.
        n_long: Number of rectangles along the long-side axis.
        aspect: Long side over short side, at least 1.
        orientation: Whether the long side is horizontal (WIDE) or vertical (TALL).

    Returns:
        The background mesh.

    Raises:
        MeshError: If the box is degenerate, ``n_long < 1`` or ``aspect < 1``.
    """
    if not (bbox.width > 0.0 and bbox.height > 0.0):
        raise MeshError(f"Degenerate bounding box {bbox.width} x {bbox.height}")
    if n_long < 1:
        raise MeshError(f"n_long must be >= 1, got {n_long}")
    if aspect < 1.0:
        raise MeshError(f"aspect must be >= 1, got {aspect}")

    if orientation is Orientation.WIDE:
        nx = n_long
        dx = bbox.width / nx
        dy = dx / aspect
        ny = _cover_count(bbox.height, dy)
        xs = np.linspace(bbox.xmin, bbox.xmax, nx + 1)
        ys = bbox.ymin + dy * np.arange(ny + 1)
    else:
        ny = n_long
        dy = bbox.height / ny
        dx = dy / aspect
        nx = _cover_count(bbox.width, dx)
        xs = bbox.xmin + dx * np.arange(nx + 1)
        ys = np.linspace(bbox.ymin, bbox.ymax, ny + 1)

    gx, gy = np.meshgrid(xs, ys)
    corners = np.column_stack([gx.ravel(), gy.ravel()])
    cx, cy = np.meshgrid(0.5 * (xs[:-1] + xs[1:]), 0.5 * (ys[:-1] + ys[1:]))
    centers = np.column_stack([cx.ravel(), cy.ravel()])
    vertices = np.vstack([corners, centers])

    j, i = np.divmod(np.arange(nx * ny), nx)
    bl = j * (nx + 1) + i
    br = bl + 1
    tl = bl + nx + 1
    tr = tl + 1
    c = len(corners) + j * nx + i
    cells = np.stack(
        [
            np.column_stack([bl, br, c]),
            np.column_stack([br, tr, c]),
            np.column_stack([tr, tl, c]),
            np.column_stack([tl, bl, c]),
        ],
        axis=1,
    ).reshape(-1, 3)

    logger.info(
        f"Built {orientation.value} background grid: {nx}x{ny} rectangles of "
        f"{dx:.3e}x{dy:.3e}, {len(cells)} triangles"
    )
    return Mesh.from_arrays(vertices, cells)


def grid_for_mesh_size(
    bbox: BoundingBox,
    mesh_size: float,
    aspect: float = 5.0,
    orientation: Orientation = Orientation.WIDE,
) -> tuple[BoundingBox, int]:
    """
    Translate a reported mesh size into arguments for :func:`build_background_grid`.

    The mesh size is the geometric mean of the rectangle sides, so one
    rectangle has area ``mesh_size**2``. The box is stretched along the
    long-side axis to a whole number of rectangles, keeping its lower-left
    corner.

    Args:
        bbox: Region to cover.
        mesh_size: Square root of the rectangle area.
        aspect: Long side over short side.
        orientation: Long-side axis.

    Returns:
        Tuple of (adjusted bounding box, n_long).

    Raises:
        MeshError: If ``mesh_size`` is not positive.
    """
    if mesh_size <= 0.0:
        raise MeshError(f"mesh size must be positive, got {mesh_size}")
    long_side = math.sqrt(aspect) * mesh_size
    if orientation is Orientation.WIDE:
        n_long = _cover_count(bbox.width, long_side)
        adjusted = BoundingBox(bbox.xmin, bbox.ymin, bbox.xmin + n_long * long_side, bbox.ymax)
    else:
        n_long = _cover_count(bbox.height, long_side)
        adjusted = BoundingBox(bbox.xmin, bbox.ymin, bbox.xmax, bbox.ymin + n_long * long_side)
    return adjusted, n_long
