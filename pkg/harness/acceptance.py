"""Reference errors and acceptance bands checked by ``sbm run --check``."""

import logging
from dataclasses import dataclass, field

from geometry.boundary import NormalAudit
from harness.ladder import ConvergenceRow, ProblemKind

logger = logging.getLogger(__name__)

# Published shifted-boundary errors on the trapezoid, keyed by mesh size.
POISSON_REFERENCE = {
    4e-2: {"l2": 5.12e-3},
    2e-2: {"l2": 1.28e-3},
    1e-2: {"l2": 3.19e-4},
    5e-3: {"l2": 7.96e-5},
}
POISSON_FITTED_REFERENCE = {
    4e-2: {"l2": 4.95e-3},
    2e-2: {"l2": 1.26e-3},
    1e-2: {"l2": 3.16e-4},
    5e-3: {"l2": 7.92e-5},
}
STOKES_REFERENCE = {
    4e-2: {"strain": 1.34e-2, "velocity": 7.93e-4, "pressure": 9.81e-3},
    2e-2: {"strain": 6.57e-3, "velocity": 2.08e-4, "pressure": 3.49e-3},
    1e-2: {"strain": 3.23e-3, "velocity": 5.36e-5, "pressure": 1.25e-3},
    5e-3: {"strain": 1.60e-3, "velocity": 1.36e-5, "pressure": 4.37e-4},
}
STOKES_FITTED_REFERENCE = {
    4e-2: {"strain": 1.39e-2, "velocity": 6.01e-4, "pressure": 9.87e-3},
    2e-2: {"strain": 6.68e-3, "velocity": 1.62e-4, "pressure": 3.52e-3},
    1e-2: {"strain": 3.26e-3, "velocity": 4.21e-5, "pressure": 1.24e-3},
    5e-3: {"strain": 1.61e-3, "velocity": 1.07e-5, "pressure": 4.35e-4},
}
# Violating surrogate edges per level of the adversarial grid family.
AUDIT_REFERENCE = {
    4e-2: (1, 4.35),
    2e-2: (1, 2.33),
    1e-2: (5, 5.43),
    5e-3: (9, 5.06),
    2.5e-3: (23, 6.35),
    1.25e-3: (38, 5.38),
}
# Range of the reference violating-edge percentages.
AUDIT_BAND = (2.0, 7.0)

POISSON_RATES = {"l2": (1.95, 2.05)}
STOKES_RATES = {"strain": (0.95, 1.05), "velocity": (1.9, 2.05), "pressure": (1.4, 1.6)}


@dataclass(frozen=True)
class Bands:
    """
    Relative error tolerance against the reference and rate interval per norm.

    Shifted and fitted errors must agree within ``parity_tol`` on
    ``parity_norms``, or on every norm when it is None.
    """

    error_tol: float
    rates: dict[str, tuple[float, float]]
    reference: dict[float, dict[str, float]]
    parity_tol: float = 0.10
    fitted_reference: dict[float, dict[str, float]] = field(default_factory=dict)
    parity_norms: tuple[str, ...] | None = None


POISSON_BANDS = Bands(
    error_tol=0.05,
    rates=POISSON_RATES,
    reference=POISSON_REFERENCE,
    fitted_reference=POISSON_FITTED_REFERENCE,
)
STOKES_BANDS = Bands(
    error_tol=0.10,
    rates=STOKES_RATES,
    reference=STOKES_REFERENCE,
    fitted_reference=STOKES_FITTED_REFERENCE,
    parity_norms=("strain", "pressure"),
)


def bands_for(kind: ProblemKind) -> Bands:
    return POISSON_BANDS if kind is ProblemKind.POISSON else STOKES_BANDS


def _reference(table: dict[float, dict[str, float]], mesh_size: float) -> dict[str, float]:
    for h, values in table.items():
        if abs(h - mesh_size) <= 1e-9 * h:
            return values
    return {}


def check_ladder(
    rows: list[ConvergenceRow],
    kind: ProblemKind,
    fitted: list[ConvergenceRow] | None = None,
    bands: Bands | None = None,
) -> list[str]:
    """
    Compare a ladder against the acceptance bands.

    Errors are compared only at mesh sizes with a reference value; rates are
    checked on every level after the first. With ``fitted`` rows, fitted and
    shifted errors must agree within the parity tolerance. Every level must
    carry at least one violating edge.

    Returns:
        One message per breach; empty when the ladder passes.
    """
    bands = bands or bands_for(kind)
    breaches = []
    for row in rows:
        for norm, expected in _reference(bands.reference, row.mesh_size).items():
            got = row.errors[norm]
            if abs(got - expected) > bands.error_tol * expected:
                breaches.append(
                    f"h={row.mesh_size:.2E} {norm} error {got:.3e} outside "
                    f"{expected:.3e} +/- {100 * bands.error_tol:.0f}%"
                )
        for norm, (lo, hi) in bands.rates.items():
            rate = row.rates.get(norm)
            if rate is not None and not lo <= rate <= hi:
                breaches.append(
                    f"h={row.mesh_size:.2E} {norm} rate {rate:.2f} outside [{lo}, {hi}]"
                )
        if row.violating_count == 0:
            breaches.append(f"h={row.mesh_size:.2E} has no violating surrogate edge")

    for fit in fitted or []:
        for norm, expected in _reference(bands.fitted_reference, fit.mesh_size).items():
            got = fit.errors[norm]
            if abs(got - expected) > bands.error_tol * expected:
                breaches.append(
                    f"h={fit.mesh_size:.2E} fitted {norm} error {got:.3e} outside "
                    f"{expected:.3e} +/- {100 * bands.error_tol:.0f}%"
                )

    for sbm, fit in zip(rows, fitted or [], strict=False):
        for norm in bands.parity_norms or tuple(sbm.errors):
            got, ref = sbm.errors[norm], fit.errors[norm]
            if ref > 0.0 and abs(got - ref) > bands.parity_tol * ref:
                breaches.append(
                    f"h={sbm.mesh_size:.2E} {norm}: shifted {got:.3e} vs fitted {ref:.3e} "
                    f"differ by more than {100 * bands.parity_tol:.0f}%"
                )

    for message in breaches:
        logger.error(f"Acceptance breach: {message}")
    return breaches


def check_audit(
    levels: list[tuple[float, NormalAudit]],
    exact_counts: bool = False,
    band: tuple[float, float] | None = None,
) -> list[str]:
    """
    Every level must have a strictly positive violating-edge percentage.

    With ``exact_counts`` the counts must also equal the reference counts at
    the mesh sizes that have one. With ``band`` every percentage must lie in
    the closed interval ``(lo, hi)``.
    """
    breaches = [
        f"h={h:.2E} has no violating surrogate edge"
        for h, audit in levels
        if audit.violating_count == 0
    ]
    if exact_counts:
        for h, audit in levels:
            for ref_h, (count, _) in AUDIT_REFERENCE.items():
                if abs(ref_h - h) <= 1e-9 * ref_h and audit.violating_count != count:
                    breaches.append(
                        f"h={h:.2E} has {audit.violating_count} violating edges, expected {count}"
                    )
    if band is not None:
        lo, hi = band
        for h, audit in levels:
            if not lo <= audit.percentage <= hi:
                breaches.append(
                    f"h={h:.2E} violating share {audit.percentage:.2f}% outside [{lo}, {hi}]"
                )
    for message in breaches:
        logger.error(f"Acceptance breach: {message}")
    return breaches
