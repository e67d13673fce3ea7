"""Manufactured solutions derived symbolically with sympy."""

import logging
from collections.abc import Callable
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import sympy

logger = logging.getLogger(__name__)

X, Y = sympy.symbols("x y", real=True)


def _lambdify(expr: sympy.Expr) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized (n, 2) -> (n,) evaluator; constants broadcast to the point count."""
    fn = sympy.lambdify((X, Y), expr, modules="numpy")

    def evaluate(points: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float))
        x, y = p[:, 0], p[:, 1]
        return np.zeros_like(x) + fn(x, y)

    return evaluate


def _parse(text: str) -> sympy.Expr:
    return sympy.sympify(text, locals={"x": X, "y": Y})


@dataclass(frozen=True, eq=False)
class ScalarCase:
    """
    Exact Poisson solution u with forcing f = -lap(u) and Dirichlet data u_D = u.

    Attributes:
        name: Registry name.
        u: Symbolic solution in x, y.
    """

    name: str
    u: sympy.Expr

    @classmethod
    def from_expression(cls, text: str, name: str = "custom") -> "ScalarCase":
        return cls(name=name, u=_parse(text))

    @cached_property
    def f(self) -> sympy.Expr:
        return -(sympy.diff(self.u, X, 2) + sympy.diff(self.u, Y, 2))

    @cached_property
    def _value(self):
        return _lambdify(self.u)

    @cached_property
    def _grad(self):
        return [_lambdify(sympy.diff(self.u, s)) for s in (X, Y)]

    @cached_property
    def _forcing(self):
        return _lambdify(self.f)

    def value(self, x: np.ndarray) -> np.ndarray:
        return self._value(x)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return np.column_stack([g(x) for g in self._grad])

    def forcing(self, x: np.ndarray) -> np.ndarray:
        return self._forcing(x)

    def dirichlet(self, x: np.ndarray) -> np.ndarray:
        return self._value(x)

    def strong_residual(self, points: np.ndarray) -> np.ndarray:
        """-lap(u) - f at ``points``, with the Laplacian taken as the Hessian trace."""
        lap = sympy.hessian(self.u, (X, Y)).trace()
        return _lambdify(-lap)(points) - self.forcing(points)


@dataclass(frozen=True, eq=False)
class FlowCase:
    """
    Exact Stokes velocity (ux, uy) and pressure p with derived forcing and traction.

    f = -div(2 mu eps(u)) + grad p; the traction on a boundary with normal n is
    (2 mu eps(u) - p I) n.
    """

    name: str
    ux: sympy.Expr
    uy: sympy.Expr
    p: sympy.Expr
    mu: float = 1.0

    @cached_property
    def grad_u(self) -> sympy.Matrix:
        """Entry [i, j] = d u_i / d x_j."""
        return sympy.Matrix([[sympy.diff(u, s) for s in (X, Y)] for u in (self.ux, self.uy)])

    @cached_property
    def stress(self) -> sympy.Matrix:
        eps = (self.grad_u + self.grad_u.T) / 2
        return 2 * self.mu * eps - self.p * sympy.eye(2)

    @cached_property
    def f(self) -> tuple[sympy.Expr, sympy.Expr]:
        sigma = self.stress
        return tuple(
            -(sympy.diff(sigma[i, 0], X) + sympy.diff(sigma[i, 1], Y)) for i in range(2)
        )

    @cached_property
    def _velocity(self):
        return [_lambdify(self.ux), _lambdify(self.uy)]

    @cached_property
    def _grad(self):
        return [[_lambdify(self.grad_u[i, j]) for j in range(2)] for i in range(2)]

    @cached_property
    def _pressure(self):
        return _lambdify(self.p)

    @cached_property
    def _forcing(self):
        return [_lambdify(fi) for fi in self.f]

    @cached_property
    def _stress(self):
        return [[_lambdify(self.stress[i, j]) for j in range(2)] for i in range(2)]

    def velocity(self, x: np.ndarray) -> np.ndarray:
        return np.column_stack([u(x) for u in self._velocity])

    def velocity_gradient(self, x: np.ndarray) -> np.ndarray:
        return np.stack(
            [np.column_stack([g(x) for g in row]) for row in self._grad], axis=1
        )

    def pressure(self, x: np.ndarray) -> np.ndarray:
        return self._pressure(x)

    def forcing(self, x: np.ndarray) -> np.ndarray:
        return np.column_stack([f(x) for f in self._forcing])

    def dirichlet(self, x: np.ndarray) -> np.ndarray:
        return self.velocity(x)

    def traction(self, x: np.ndarray, normals: np.ndarray) -> np.ndarray:
        normals = np.atleast_2d(normals)
        return np.column_stack(
            [row[0](x) * normals[:, 0] + row[1](x) * normals[:, 1] for row in self._stress]
        )

    def strong_residual(self, points: np.ndarray) -> np.ndarray:
        """
        (n, 3) residuals of momentum (x, y) and continuity at ``points``.

        Momentum is re-derived as -mu lap(u) - mu grad(div u) + grad p - f,
        independently of the stress-divergence form used for the forcing.
        """
        div = sympy.diff(self.ux, X) + sympy.diff(self.uy, Y)
        cols = []
        for u, s, f in zip((self.ux, self.uy), (X, Y), self._forcing, strict=True):
            lap = sympy.diff(u, X, 2) + sympy.diff(u, Y, 2)
            expr = -self.mu * lap - self.mu * sympy.diff(div, s) + sympy.diff(self.p, s)
            cols.append(_lambdify(expr)(points) - f(points))
        cols.append(_lambdify(div)(points))
        return np.column_stack(cols)


def poisson_trig() -> ScalarCase:
    """u = y sin(2 pi x) - x cos(2 pi y)."""
    return ScalarCase(
        name="trig", u=Y * sympy.sin(2 * sympy.pi * X) - X * sympy.cos(2 * sympy.pi * Y)
    )


def poisson_affine() -> ScalarCase:
    return ScalarCase(name="affine", u=2 * X - 3 * Y + 1)


def stokes_trapezoid(mu: float = 1.0) -> FlowCase:
    """Divergence-free velocity with pressure x^2 e^(xy) + y^2."""
    a = -sympy.Rational(1, 5) * X**3 - sympy.Rational(1, 5) * X**2 + X + 1
    b = -sympy.Rational(3, 5) * X**2 - sympy.Rational(2, 5) * X + 1
    return FlowCase(
        name="trapezoid",
        ux=-a * sympy.cos(Y),
        uy=b * sympy.sin(Y),
        p=X**2 * sympy.exp(X * Y) + Y**2,
        mu=mu,
    )


def stokes_affine(mu: float = 1.0) -> FlowCase:
    """u = (x, -y), p = 1: reproduced exactly by the discrete scheme."""
    return FlowCase(name="affine", ux=X, uy=-Y, p=sympy.Integer(1), mu=mu)


POISSON_CASES: dict[str, Callable[[], ScalarCase]] = {
    "trig": poisson_trig,
    "affine": poisson_affine,
}

STOKES_CASES: dict[str, Callable[[float], FlowCase]] = {
    "trapezoid": stokes_trapezoid,
    "affine": stokes_affine,
}


def consistency_check(case: ScalarCase | FlowCase, n_points: int = 50, seed: int = 42) -> float:
    """
    Max absolute strong-form residual at random points of the unit square.

    Returns:
        The largest residual magnitude; ~1e-13 for a consistent case.
    """
    rng = np.random.default_rng(seed)
    points = rng.random((n_points, 2))
    worst = float(np.max(np.abs(case.strong_residual(points))))
    logger.debug(f"Case '{case.name}' strong residual {worst:.3e} at {n_points} points")
    return worst
