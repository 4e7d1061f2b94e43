"""Numba switch.

The hot strip kernels are written once in a numba-compatible subset of Python
and once with numpy broadcasting.  ``IMSPEKIT_DISABLE_NUMBA=1`` (or a missing
numba install) selects the numpy path.
"""

import os

_FALSY = {"1", "true", "yes", "on"}

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_AVAILABLE = numba is not None
NUMBA_ENABLED = NUMBA_AVAILABLE and os.environ.get("IMSPEKIT_DISABLE_NUMBA", "").strip().lower() not in _FALSY


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, otherwise the identity decorator."""
    if NUMBA_AVAILABLE:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


def default_backend():
    return "numba" if NUMBA_ENABLED else "numpy"
