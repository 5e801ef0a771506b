"""Optional numba acceleration.

Set ``SVFRONT_NUMBA=0`` in the environment to run every kernel on its
pure-numpy path.  The flag is read once at import time.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("SVFRONT_NUMBA", "1").lower() not in (
    "0",
    "false",
    "no",
    "off",
)


def njit(func):
    """``numba.njit(cache=True)`` when numba is importable, identity otherwise."""
    if not NUMBA_AVAILABLE:
        return func
    return numba.njit(cache=True)(func)
