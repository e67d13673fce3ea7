"""Property probes: coercivity, discrete trace, consistency, patch and symmetry."""

from verify.battery import BatteryError, collect_probes, run_battery, write_summaries
from verify.probes import (
    consistency_problem,
    h1_gram,
    max_trace_ratio,
    run_coercivity_probe,
    run_consistency_probe,
    run_patch_probe,
    run_symmetry_probe,
    run_trace_probe,
    smallest_generalized_eigenvalue,
    trace_ratio,
)
from verify.report import ProbeReport, ProbeSettings

__all__ = [
    "BatteryError",
    "ProbeReport",
    "ProbeSettings",
    "collect_probes",
    "consistency_problem",
    "h1_gram",
    "max_trace_ratio",
    "run_battery",
    "run_coercivity_probe",
    "run_consistency_probe",
    "run_patch_probe",
    "run_symmetry_probe",
    "run_trace_probe",
    "smallest_generalized_eigenvalue",
    "trace_ratio",
    "write_summaries",
]
