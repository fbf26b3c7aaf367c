"""Integration kernel selection.

The compiled core is used when it was built; otherwise, or when
``LOWINERTIA_PURE_PYTHON=1`` is set, the pure-Python implementation runs
the identical algorithm.
"""
from __future__ import annotations

import os

from . import _pykernels

__all__ = ["dopri5", "tableau", "BACKEND", "PENDULUM", "STAR", "backend_module"]

PENDULUM = 0
STAR = 1


def backend_module(pure: bool | None = None):
    """Return the compiled module, or the Python one if forced or unavailable."""
    if pure is None:
        pure = os.environ.get("LOWINERTIA_PURE_PYTHON", "") not in ("", "0")
    if not pure:
        try:
            from . import _kernels
            return _kernels
        except ImportError:
            pass
    return _pykernels


_impl = backend_module()
BACKEND = "compiled" if _impl is not _pykernels else "python"
dopri5 = _impl.dopri5
tableau = _impl.tableau
