"""Backend selection for the hot kernels.

Prefers the compiled extension ``zolab._speedups``; falls back to the
numpy/scipy implementation in ``zolab._kernels_py``. Set
``ZOLAB_PURE_PYTHON=1`` to force the fallback (useful for benchmarks and
for debugging the kernels themselves).
"""

from __future__ import annotations

import importlib
import os


def load_backend(name: str):
    """Return the kernel module for ``name`` ("cython" or "python")."""
    if name == "cython":
        return importlib.import_module("zolab._speedups")
    if name == "python":
        return importlib.import_module("zolab._kernels_py")
    raise ValueError(f"unknown kernel backend {name!r}")


def _select():
    if os.environ.get("ZOLAB_PURE_PYTHON", "") not in ("", "0"):
        return load_backend("python"), "python"
    try:
        return load_backend("cython"), "cython"
    except ImportError:
        return load_backend("python"), "python"


_impl, backend = _select()

ball_words = _impl.ball_words
first_member_center = _impl.first_member_center
member_centers = _impl.member_centers
crosses = _impl.crosses
