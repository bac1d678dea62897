"""Backend selection for the hot geometry kernels.

Kernels in :mod:`tewa.kernels` are numba-compiled when numba is importable,
unless the ``TEWA_NUMBA`` environment variable turns it off:

* ``TEWA_NUMBA=0`` (or ``false``/``off``/``no``) -- force the pure-Python
  fallback even when numba is installed.
* ``TEWA_NUMBA=1`` (or ``true``/``on``/``yes``) -- require numba; raise at
  import time if it is missing.
* unset or ``auto`` -- use numba when available, fall back silently otherwise.

The flag is read once at import time; the benchmark in
``benchmarks/bench_kernels.py`` reaches the uncompiled bodies through the
``.py_func`` attribute numba attaches to compiled dispatchers.
"""

from __future__ import annotations

import os

try:
    import numba
except ImportError:  # pragma: no cover - exercised only on numba-less installs
    numba = None

_FALSEY = {"0", "false", "off", "no"}
_TRUEY = {"1", "true", "on", "yes"}


def _resolve_enabled() -> bool:
    raw = os.environ.get("TEWA_NUMBA", "auto").strip().lower()
    if raw in _FALSEY:
        return False
    if raw in _TRUEY:
        if numba is None:
            raise RuntimeError("TEWA_NUMBA is set but numba is not installed")
        return True
    return numba is not None


NUMBA_ENABLED = _resolve_enabled()


def maybe_njit(func=None, **options):
    """``numba.njit`` when acceleration is on, identity decorator otherwise."""

    def wrap(f):
        if NUMBA_ENABLED:
            return numba.njit(cache=True, **options)(f)
        return f

    if func is None:
        return wrap
    return wrap(func)
