"""Filippov and regularized dynamics near the intersection of two switching planes."""
from .fields import CUBIC, IDENTITY, PiecewiseField, SmoothField3, TransitionFunction
from .kernels import BACKEND
from .regularization import Regime

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CUBIC",
    "IDENTITY",
    "PiecewiseField",
    "Regime",
    "SmoothField3",
    "TransitionFunction",
    "__version__",
]
