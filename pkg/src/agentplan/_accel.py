"""Numba switch.

Set ``AGENTPLAN_DISABLE_NUMBA=1`` to run the pure-numpy kernels instead of the
JIT-compiled ones (useful for debugging and for platforms without numba).
"""

import os

_FLAG = "AGENTPLAN_DISABLE_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get(_FLAG, "").strip().lower() not in {"1", "true", "yes", "on"}


def njit(func):
    """``numba.njit(cache=True)`` when numba is importable, else identity."""
    if not NUMBA_AVAILABLE:
        return func
    return numba.njit(cache=True)(func)
