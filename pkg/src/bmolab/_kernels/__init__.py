"""Hot-kernel backend selection.

The compiled Cython core is used when importable; otherwise the NumPy
fallback provides identical semantics.  Set ``BMOLAB_NO_EXT=1`` to force
the fallback (used by the backend-agreement tests and the benchmark).
"""

from __future__ import annotations

import os

from .fallback import (  # noqa: F401  (re-exported reference implementations)
    SYM_PAIR,
    SYM_TABLE_LINEAR,
    SYM_TABLE_NEAREST,
    omega_values,
)
from . import fallback as _fallback

if os.environ.get("BMOLAB_NO_EXT"):
    _impl = _fallback
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _fallback

linear_sum = _impl.linear_sum
bilinear_sum = _impl.bilinear_sum
osc_reduce = _impl.osc_reduce


def backend_name() -> str:
    return "cython" if _impl is not _fallback else "numpy"
