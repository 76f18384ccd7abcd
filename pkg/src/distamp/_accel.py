"""Optional numba acceleration.

Hot loops are written once and compiled with ``numba.njit`` when numba is
importable. Setting ``DISTAMP_NUMBA=0`` forces the pure-numpy code paths.
"""

import os

try:
    from numba import njit as _njit
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False

NUMBA_ENABLED = _HAVE_NUMBA and os.environ.get("DISTAMP_NUMBA", "1").strip().lower() not in (
    "0", "false", "no", "off")


def optional_njit(*args, **kwargs):
    """``njit`` when acceleration is enabled, identity otherwise."""
    def decorator(func):
        if NUMBA_ENABLED:
            return _njit(*args, **kwargs)(func)
        return func
    return decorator
