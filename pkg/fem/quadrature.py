"""Quadrature rules on triangles (barycentric) and on edges (unit parameter)."""

from dataclasses import dataclass
from enum import Enum

import numpy as np


class RuleKind(Enum):
    """Reference entity a rule integrates over."""

    CELL = "cell"
    EDGE = "edge"


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """
    Quadrature points and weights normalized to unit reference measure.

    Cell rules hold barycentric points (q, 3) and weights summing to 1, so an
    integral over a triangle T is ``|T| * sum(w * f(x_q))``. Edge rules hold
    parameters s in [0, 1] (q,) and weights summing to 1, scaled by the edge
    length in the same way.
    """

    points: np.ndarray
    weights: np.ndarray
    degree: int
    kind: RuleKind

    @property
    def size(self) -> int:
        return len(self.weights)


def _orbit3(a: float) -> list[tuple[float, float, float]]:
    b = 1.0 - 2.0 * a
    return [(a, a, b), (a, b, a), (b, a, a)]


def _orbit6(a: float, b: float) -> list[tuple[float, float, float]]:
    c = 1.0 - a - b
    return [(a, b, c), (b, c, a), (c, a, b), (b, a, c), (a, c, b), (c, b, a)]


def _symmetric_rule(
    orbits: list[tuple[list[tuple[float, float, float]], float]], degree: int
) -> QuadratureRule:
    points = []
    weights = []
    for orbit, weight in orbits:
        points.extend(orbit)
        weights.extend([weight] * len(orbit))
    weights = np.array(weights)
    return QuadratureRule(
        points=np.array(points),
        weights=weights / weights.sum(),
        degree=degree,
        kind=RuleKind.CELL,
    )


# Symmetric Gauss rules on the triangle (Strang-Fix / Dunavant tables).
_CELL_RULES = {
    1: _symmetric_rule([([(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)], 1.0)], 1),
    2: _symmetric_rule([(_orbit3(1.0 / 6.0), 1.0 / 3.0)], 2),
    4: _symmetric_rule(
        [
            (_orbit3(0.445948490915965), 0.223381589678011),
            (_orbit3(0.091576213509771), 0.109951743655322),
        ],
        4,
    ),
    6: _symmetric_rule(
        [
            (_orbit3(0.249286745170910), 0.116786275726379),
            (_orbit3(0.063089014491502), 0.050844906370207),
            (_orbit6(0.053145049844817, 0.310352451033784), 0.082851075618374),
        ],
        6,
    ),
}


def cell_rule(degree: int) -> QuadratureRule:
    """
    Smallest tabulated triangle rule exact for polynomials of ``degree``.

    Raises:
        ValueError: If no tabulated rule reaches ``degree``.
    """
    for available in sorted(_CELL_RULES):
        if available >= degree:
            return _CELL_RULES[available]
    raise ValueError(f"No triangle rule of degree {degree}; maximum is {max(_CELL_RULES)}")


def composite_cell_rule(degree: int, levels: int) -> QuadratureRule:
    """
    Apply :func:`cell_rule` on each of the 4**levels subtriangles of a uniform split.

    Used where quadrature error must stay far below discretization error for
    non-polynomial integrands.
    """
    base = cell_rule(degree)
    if levels <= 0:
        return base
    n = 2**levels
    sub = []
    for i in range(n):
        for j in range(n - i):
            sub.append([(i, j), (i + 1, j), (i, j + 1)])
            if i + j <= n - 2:
                sub.append([(i + 1, j), (i + 1, j + 1), (i, j + 1)])
    corners = np.array(sub, dtype=float) / n  # (4**levels, 3, 2) reference coordinates
    xi_eta = np.einsum("qk,tkd->tqd", base.points, corners).reshape(-1, 2)
    points = np.column_stack([1.0 - xi_eta.sum(axis=1), xi_eta])
    weights = np.tile(base.weights, len(sub)) / len(sub)
    return QuadratureRule(points=points, weights=weights, degree=base.degree, kind=RuleKind.CELL)


def edge_rule(n_points: int = 3) -> QuadratureRule:
    """Gauss-Legendre rule on [0, 1] with ``n_points`` points (degree 2n - 1)."""
    if n_points < 1:
        raise ValueError(f"Edge rule needs at least one point, got {n_points}")
    x, w = np.polynomial.legendre.leggauss(n_points)
    return QuadratureRule(
        points=0.5 * (x + 1.0),
        weights=0.5 * w,
        degree=2 * n_points - 1,
        kind=RuleKind.EDGE,
    )
