"""Environment-backed defaults shared by the CLI, the ladder driver and the probes."""

import os

DEFAULT_OUTPUT_DIR = "results"
DEFAULT_SEED = 42
DEFAULT_LOG_LEVEL = "INFO"


def output_dir(value: str | None = None) -> str:
    """Report directory: explicit value, else ``SBM_OUTPUT_DIR``, else ``results``."""
    return value or os.environ.get("SBM_OUTPUT_DIR") or DEFAULT_OUTPUT_DIR


def seed(value: int | None = None) -> int:
    """
    Random seed for probes and sampled diagnostics.

    Args:
        value: Explicit seed. Defaults to the ``SBM_SEED`` env var, then 42.

    Raises:
        ValueError: If ``SBM_SEED`` is set but is not an integer.
    """
    if value is not None:
        return value
    raw = os.environ.get("SBM_SEED")
    if raw is None or raw == "":
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError as e:
        raise ValueError(f"SBM_SEED must be an integer, got '{raw}'") from e


def log_level(value: str | None = None) -> str:
    """Logging level name: explicit value, else ``SBM_LOG_LEVEL``, else ``INFO``."""
    return (value or os.environ.get("SBM_LOG_LEVEL") or DEFAULT_LOG_LEVEL).upper()
