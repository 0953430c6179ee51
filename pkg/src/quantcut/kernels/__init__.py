"""Statevector kernels with import-time backend selection.

The compiled extension is preferred when it imported cleanly; setting
``QUANTCUT_PURE_PYTHON=1`` forces the numpy fallback.  ``BACKEND`` names the
active implementation so callers and benchmarks can report it.
"""

import os

from . import _fallback

if os.environ.get("QUANTCUT_PURE_PYTHON", "0") not in ("", "0"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"

apply_1q = _impl.apply_1q
apply_2q = _impl.apply_2q
pauli_expval = _impl.pauli_expval
prob_one = _impl.prob_one
collapse = _impl.collapse

__all__ = [
    "BACKEND",
    "apply_1q",
    "apply_2q",
    "pauli_expval",
    "prob_one",
    "collapse",
]
