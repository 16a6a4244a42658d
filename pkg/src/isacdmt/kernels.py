"""Backend selection for the Monte Carlo hot loops.

The compiled extension is used when it imports; otherwise (or when the
``ISACDMT_PURE_PYTHON`` environment variable is set to a non-empty value
other than ``0``) the numpy fallback is used. ``BACKEND`` names the choice.
"""

from __future__ import annotations

import os

from . import _kernels_py

_force_py = os.environ.get("ISACDMT_PURE_PYTHON", "") not in ("", "0")

try:
    if _force_py:
        raise ImportError("pure-Python backend forced")
    from . import _kernels as _impl  # type: ignore[attr-defined]
    BACKEND = "compiled"
except ImportError:
    _impl = _kernels_py
    BACKEND = "python"

gram_eigvalsh = _impl.gram_eigvalsh
outage_counts = _impl.outage_counts

__all__ = ["BACKEND", "gram_eigvalsh", "outage_counts"]
