"""Optional numba acceleration for the hot numerical kernels.

Set ``RYDVDW_DISABLE_NUMBA=1`` to force the pure-numpy/Python fallbacks, e.g.
for debugging or for benchmarking the compiled kernels against them.  When
numba is not importable the fallbacks are used silently.
"""

from __future__ import annotations

import os

__all__ = ["njit", "NUMBA_ENABLED"]


def _env_disabled() -> bool:
    return os.environ.get("RYDVDW_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}


try:
    if _env_disabled():
        raise ImportError("disabled by RYDVDW_DISABLE_NUMBA")
    from numba import njit as _numba_njit

    NUMBA_ENABLED = True
except ImportError:
    _numba_njit = None
    NUMBA_ENABLED = False


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise the identity decorator."""
    if _numba_njit is not None:
        return _numba_njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn
