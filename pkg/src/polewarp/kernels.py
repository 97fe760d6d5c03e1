"""Kernel backend selection.

Prefers the compiled extension; falls back to the pure-numpy twin when the
extension is missing (source checkout without a build) or when the
POLEWARP_BACKEND=python environment override is set.
"""

import os

from . import _kernels_py

if os.environ.get("POLEWARP_BACKEND", "").lower() == "python":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

warp_points = _impl.warp_points
ray_hit_counts = _impl.ray_hit_counts


def available_backends():
    """Name -> module for every importable backend (for tests/benchmarks)."""
    backends = {"python": _kernels_py}
    try:
        from . import _kernels

        backends["cython"] = _kernels
    except ImportError:
        pass
    return backends
