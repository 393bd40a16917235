"""RK4 hot loops with a compiled backend and a pure-Python fallback.

The Cython extension is used when it was built; setting
``TWOCROSS_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
if os.environ.get("TWOCROSS_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
else:
    _impl = _pykernels

rk4_regularized_constant = _impl.rk4_regularized_constant
rk4_quadratic = _impl.rk4_quadratic

__all__ = ["BACKEND", "rk4_regularized_constant", "rk4_quadratic"]
