"""Backend selection for the numeric kernels.

Kernels are written once as plain scalar Python and compiled with numba when it
is available. Setting ``BESSELCALL_DISABLE_JIT=1`` (or ``true``/``yes``) before
import runs the same kernels in the interpreter; Monte Carlo path simulation then
switches to a vectorised numpy implementation instead.
"""

from __future__ import annotations

import os

_FLAG = os.environ.get("BESSELCALL_DISABLE_JIT", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and _FLAG not in ("1", "true", "yes", "on")
BACKEND = "numba" if USE_NUMBA else "numpy"


def jit(func=None, **kwargs):
    """``numba.njit`` with caching, or the identity when the JIT is disabled."""

    def wrap(f):
        if not USE_NUMBA:
            f.py_func = f
            return f
        opts = {"cache": True, "nogil": True}
        opts.update(kwargs)
        return numba.njit(**opts)(f)

    if func is None:
        return wrap
    return wrap(func)
