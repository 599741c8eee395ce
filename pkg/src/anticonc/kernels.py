"""Kernel backend selection.

The compiled extension ``anticonc._ckernels`` is used when it imports;
otherwise the numpy implementations in ``anticonc._kernels_py`` are used.
Set ``ANTICONC_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("ANTICONC_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND

gamma_pq = _impl.gamma_pq
equicorr_diag = _impl.equicorr_diag
equicorr_diag_deriv = _impl.equicorr_diag_deriv
pwl_eval = _impl.pwl_eval
pwl_inverse = _impl.pwl_inverse
hermite_invert = _impl.hermite_invert
# numpy's vectorized count is faster than the compiled loop (see benchmarks/)
window_count = _kernels_py.window_count

__all__ = [
    "BACKEND",
    "gamma_pq",
    "equicorr_diag",
    "equicorr_diag_deriv",
    "pwl_eval",
    "pwl_inverse",
    "hermite_invert",
    "window_count",
]
