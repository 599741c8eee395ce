"""Sharp anti-concentration bounds for the maximum of identically distributed,
dependent random variables, the copula diagonals attaining them, and a
Monte Carlo harness that checks both."""

from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
