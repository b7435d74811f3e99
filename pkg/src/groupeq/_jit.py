"""Optional numba compilation.

Set ``GROUPEQ_DISABLE_JIT=1`` to run every kernel as plain Python.  Either
way each kernel exposes ``py_func``, the undecorated Python function.
"""
from __future__ import annotations

import os

JIT_DISABLED = os.environ.get("GROUPEQ_DISABLE_JIT", "").strip().lower() not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    JIT_DISABLED = True


def njit(fn):
    if JIT_DISABLED:
        fn.py_func = fn
        return fn
    return numba.njit(cache=True, nogil=True)(fn)
