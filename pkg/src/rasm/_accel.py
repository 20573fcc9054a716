"""Backend selection for the hot kernels.

Set ``RASM_DISABLE_NUMBA=1`` to force the pure-numpy path.  Thread count for
the numba path can be capped with ``RASM_NUM_THREADS``.
"""
import os

_FALSY = ("", "0", "false", "no", "off")


def _flag(name):
    return os.environ.get(name, "").strip().lower() not in _FALSY


try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and not _flag("RASM_DISABLE_NUMBA")

if numba is not None and "NUMBA_THREADING_LAYER" not in os.environ:
    # skip the TBB probe, which warns on older TBB builds
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise an identity decorator."""
    if numba is None:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f
    return numba.njit(*args, **kwargs)


def configure_threads():
    """Apply ``RASM_NUM_THREADS`` to numba; returns the active thread count."""
    if numba is None:
        return 1
    requested = os.environ.get("RASM_NUM_THREADS")
    if requested:
        n = max(1, min(int(requested), numba.config.NUMBA_NUM_THREADS))
        numba.set_num_threads(n)
    return numba.get_num_threads()
