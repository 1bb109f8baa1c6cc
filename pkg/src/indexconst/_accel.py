"""Numba switch.

Set ``INDEXCONST_NO_NUMBA=1`` to force the pure-numpy kernels even when
numba is importable.  The flag is read once, at import time.
"""
import os

ENV_FLAG = "INDEXCONST_NO_NUMBA"

try:
    import numba  # noqa: F401
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def _flag_set(value):
    return value.strip().lower() in ("1", "true", "yes", "on")


USE_NUMBA = HAVE_NUMBA and not _flag_set(os.environ.get(ENV_FLAG, ""))
