"""Backend switch for the hot numeric kernels.

Every kernel ships twice: a loop version compiled with ``numba.njit`` and a
vectorised numpy version. The numba path is used when numba imports and the
environment variable ``SHAPELAB_NUMBA`` is not set to ``0``/``false``/``off``.
The flag is read once, at import time.
"""

from __future__ import annotations

import os

_OFF = {"0", "false", "off", "no"}

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

NUMBA_AVAILABLE = _numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get("SHAPELAB_NUMBA", "1").strip().lower() not in _OFF


def njit(fn):
    """Compile ``fn`` with numba when it is importable, else return it untouched.

    Compilation happens even when the numpy path is selected so that tests and
    benchmarks can still compare both backends in one process.
    """
    if _numba is None:
        return fn
    return _numba.njit(cache=True, nogil=True)(fn)


def pick(numba_impl, numpy_impl):
    return numba_impl if USE_NUMBA else numpy_impl


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
