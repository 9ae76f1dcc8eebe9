"""Backend selection for the numeric kernels.

Set ``QMAC_DISABLE_NUMBA=1`` to force the pure-numpy path. If numba cannot be
imported the numpy path is used silently.
"""
import os

_FALSEY = {"", "0", "false", "no", "off"}

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("QMAC_DISABLE_NUMBA", "0").strip().lower() in _FALSEY


def njit(fn):
    """Compile ``fn`` with numba when available, else return it unchanged.

    Compilation is applied whenever numba is importable so the benchmark can
    time both paths in one process; the env flag only decides which path the
    library dispatches to.
    """
    if not NUMBA_AVAILABLE:
        return fn
    return numba.njit(cache=True)(fn)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
