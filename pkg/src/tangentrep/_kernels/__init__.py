"""Hot-loop kernels with backend selection at import time.

The compiled extension ``tangentrep._core`` is preferred; the pure-numpy
fallback in ``._py`` is used when the extension is missing or when
``TANGENTREP_FORCE_FALLBACK=1`` is set.  Both expose the same two functions
with identical semantics, so results do not depend on the backend.
"""

from __future__ import annotations

import os

from . import _py

_FORCED = os.environ.get("TANGENTREP_FORCE_FALLBACK", "") == "1"

if not _FORCED:
    try:
        from tangentrep import _core as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _py
        BACKEND = "fallback"
else:
    _impl = _py
    BACKEND = "fallback"

maximin_block = _impl.maximin_block
clause_any_all_block = _impl.clause_any_all_block


def backend() -> str:
    """Name of the kernel backend in use: 'compiled' or 'fallback'."""
    return BACKEND


def available_backends() -> dict:
    """Importable kernel implementations keyed by name (for benchmarks/tests)."""
    impls = {"fallback": _py}
    try:
        from tangentrep import _core

        impls["compiled"] = _core
    except ImportError:
        pass
    return impls


def thread_count() -> int:
    """Worker threads for batch evaluation, from TANGENTREP_THREADS (>= 1)."""
    raw = os.environ.get("TANGENTREP_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
