"""Probe outcomes and probe configuration."""

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ProbeReport:
    """
    Outcome of one property probe.

    Attributes:
        name: Probe identifier, unique within a battery.
        passed: Whether ``measured`` met ``tolerance``.
        measured: The probed quantity.
        tolerance: Threshold the quantity is compared against.
        context: Mesh and parameter context (mesh size, alpha, seed, ...).
    """

    name: str
    passed: bool
    measured: float
    tolerance: float
    context: dict = field(default_factory=dict)

    def to_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        ctx = " ".join(f"{k}={v}" for k, v in sorted(self.context.items()))
        return (
            f"{status} {self.name} measured={self.measured:.6e} "
            f"tolerance={self.tolerance:.3e} {ctx}".rstrip()
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "context": dict(sorted(self.context.items())),
        }


@dataclass
class ProbeSettings:
    """Sample counts, seed and tolerances of the probe battery."""

    seed: int = 42
    mesh_sizes: tuple[float, ...] = (4e-2, 2e-2, 1e-2)
    coercivity_block: int = 4
    coercivity_tol: float = 1e-6
    coercivity_iterations: int = 500
    trace_samples: int = 1000
    trace_variation: float = 0.10
    test_functions: int = 20
    consistency_tol: float = 1e-8
    consistency_degree: int = 6
    consistency_levels: int = 3
    consistency_edge_points: int = 10
    patch_tol: float = 1e-9
    poisson_alphas: tuple[float, ...] = (10.0,)
    stokes_alphas: tuple[float, ...] = (2.5,)
