"""Common utilities for sbm2d."""

from common.paths import PathError, is_report_name, resolve_output_path

__all__ = ["PathError", "is_report_name", "resolve_output_path"]
