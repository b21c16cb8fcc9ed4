"""Kernel backend selection: compiled extension with pure-Python fallback.

Set WHITESURF_PURE=1 to force the fallback (used by the benchmark and tests).
"""

import os

from .packed import (
    SENTINEL_AT_CENTER,
    SENTINEL_ZERO_IMAGE,
    FieldTables,
    plane_size,
    point_code_from_coords,
    point_coords_from_code,
    projection_key_bound,
    subsystem_coords_from_index,
    subsystem_size,
)

if os.environ.get("WHITESURF_PURE"):
    from . import pyref as _impl

    BACKEND = "python"
else:
    try:
        from . import _fastcore as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import pyref as _impl

        BACKEND = "python"

rref_mod = _impl.rref_mod
eval_forms_at_points = _impl.eval_forms_at_points
plane_form_values = _impl.plane_form_values
plane_project_keys = _impl.plane_project_keys
scan_combo_zero_hits = _impl.scan_combo_zero_hits

__all__ = [
    "BACKEND",
    "FieldTables",
    "SENTINEL_AT_CENTER",
    "SENTINEL_ZERO_IMAGE",
    "eval_forms_at_points",
    "plane_form_values",
    "plane_project_keys",
    "plane_size",
    "point_code_from_coords",
    "point_coords_from_code",
    "projection_key_bound",
    "rref_mod",
    "scan_combo_zero_hits",
    "subsystem_coords_from_index",
    "subsystem_size",
]
