"""Kernel dispatch: compiled core when available, pure Python otherwise.

``BACKEND`` reports which implementation is active. Setting the environment
variable ``CONGESTLAB_PURE=1`` forces the fallback.
"""
from __future__ import annotations

import os

from congestlab import _kernels_py as pure

if os.environ.get("CONGESTLAB_PURE"):
    _impl = pure
    BACKEND = "python"
else:
    try:
        from congestlab import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = pure
        BACKEND = "python"

shortest_cycle = _impl.shortest_cycle
cycles_of_length = _impl.cycles_of_length
match_pattern = _impl.match_pattern

__all__ = ["BACKEND", "pure", "shortest_cycle", "cycles_of_length", "match_pattern"]
