"""Output path validation for reports, field dumps and probe summaries."""

import os
import re
from pathlib import Path


class PathError(Exception):
    """Raised when an output path is unsafe or cannot be prepared."""

    pass


# One path component of a generated file: stems like poisson_trig_sbm_level0.
NAME_COMPONENT = re.compile(r"[A-Za-z0-9][A-Za-z0-9_.+-]*")
REPORT_SUFFIXES = frozenset({".csv", ".md", ".txt", ".json", ".vtk"})


def is_report_name(filename: str) -> bool:
    """
    Whether ``filename`` is a relative report path this package would generate.

    Every ``/``-separated component must be a plain name (letters, digits and
    ``_ . + -``, not starting with a dot) and the last one must carry a known
    report suffix.
    """
    parts = filename.split("/")
    if not all(NAME_COMPONENT.fullmatch(part) and ".." not in part for part in parts):
        return False
    return Path(parts[-1]).suffix in REPORT_SUFFIXES


def resolve_output_path(out_dir: str | os.PathLike, filename: str) -> Path:
    """
    Resolve a report file inside ``out_dir``, creating the directory if needed.

    Args:
        out_dir: Directory that all generated files must stay within.
        filename: Relative file name, e.g. ``"poisson_sbm.csv"``.

    Returns:
        Absolute path guaranteed to lie within ``out_dir``.

    Raises:
        PathError: If the name is unsafe, escapes ``out_dir``, or the directory
            cannot be created.
    """
    if not str(out_dir):
        raise PathError("Output directory cannot be empty")

    if not is_report_name(filename):
        raise PathError(f"Unsafe report file name: '{filename}'")

    base = Path(out_dir).resolve()
    try:
        base.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise PathError(f"Cannot create output directory '{out_dir}': {e}") from e

    target = (base / filename).resolve()
    try:
        target.relative_to(base)
    except ValueError as e:
        raise PathError(f"Path '{filename}' escapes output directory '{out_dir}'") from e

    if not os.access(base, os.W_OK):
        raise PathError(f"Output directory '{out_dir}' is not writable")

    return target
