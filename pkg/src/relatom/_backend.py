"""Kernel backend selection.

The compiled Cython extension is preferred; the pure-Python module is a
drop-in replacement used when the extension is unavailable or when
``RELAT_DENSITY_PURE_PY`` is set (useful for benchmarking and debugging).
"""

import os

if os.environ.get("RELAT_DENSITY_PURE_PY"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels

backend_name = kernels.BACKEND


def thread_count():
    """Worker cap for data-parallel sweeps (RELAT_DENSITY_THREADS)."""
    env = os.environ.get("RELAT_DENSITY_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)
