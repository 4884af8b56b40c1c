"""JIT switch for the hot kernels.

Set ``EPKIT_DISABLE_JIT=1`` to run the pure-numpy code paths instead of the
numba-compiled ones (handy for debugging and for the benchmark baseline).
"""

import os

_FLAG = os.environ.get("EPKIT_DISABLE_JIT", "").strip().lower()

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False

JIT_ENABLED = HAS_NUMBA and _FLAG not in ("1", "true", "yes", "on")


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, identity decorator otherwise."""
    if not HAS_NUMBA:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f
    return numba.njit(*args, **kwargs)
