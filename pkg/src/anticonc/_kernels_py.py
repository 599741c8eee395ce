"""Pure numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_ckernels.pyx``.
The two are cross-checked in ``tests/test_kernels.py``.
"""

import math

import numpy as np
from scipy.special import ndtr

BACKEND = "python"

_EPS = 2.0**-53
_TINY = 1e-300
_MAX_ITER = 10_000
# elements per (t x node) block in the quadrature sum
_BLOCK = 1 << 22


def _gamma_series(a, x):
    """Lower regularized P(a, x) by power series; accurate for x < a + 1."""
    term = np.full_like(x, 1.0 / a)
    total = term.copy()
    ap = np.full_like(x, a)
    active = np.ones(x.shape, dtype=bool)
    for _ in range(_MAX_ITER):
        ap[active] += 1.0
        term[active] *= x[active] / ap[active]
        total[active] += term[active]
        active &= np.abs(term) >= np.abs(total) * _EPS
        if not active.any():
            break
    log_pref = a * np.log(x) - x - math.lgamma(a)
    return total * np.exp(log_pref)


def _gamma_cf(a, x):
    """Upper regularized Q(a, x) by modified Lentz continued fraction; x >= a + 1."""
    b = x + 1.0 - a
    c = np.full_like(x, 1.0 / _TINY)
    dd = 1.0 / b
    h = dd.copy()
    active = np.ones(x.shape, dtype=bool)
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b = b + 2.0
        dd_new = an * dd + b
        dd_new = np.where(np.abs(dd_new) < _TINY, _TINY, dd_new)
        c_new = b + an / c
        c_new = np.where(np.abs(c_new) < _TINY, _TINY, c_new)
        dd_new = 1.0 / dd_new
        delta = dd_new * c_new
        dd = np.where(active, dd_new, dd)
        c = np.where(active, c_new, c)
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) >= _EPS
        if not active.any():
            break
    log_pref = a * np.log(x) - x - math.lgamma(a)
    return h * np.exp(log_pref)


def gamma_pq(a, x):
    """Regularized incomplete gamma pair (P, Q) for shape ``a`` at points ``x``.

    Uses the series below ``a + 1`` and the continued fraction above it, so
    whichever of P, Q is small is computed directly rather than by subtraction.
    """
    x = np.asarray(x, dtype=np.float64)
    p = np.zeros_like(x)
    q = np.ones_like(x)
    pos = x > 0
    big = np.isposinf(x)
    p[big] = 1.0
    q[big] = 0.0
    lo = pos & ~big & (x < a + 1.0)
    hi = pos & ~big & (x >= a + 1.0)
    if lo.any():
        p[lo] = _gamma_series(a, x[lo])
        q[lo] = 1.0 - p[lo]
    if hi.any():
        q[hi] = _gamma_cf(a, x[hi])
        p[hi] = 1.0 - q[hi]
    return p, q


def equicorr_diag(a, nodes, weights, sqrt_rho, sqrt_1m_rho, d):
    """sum_j w_j Phi((a - sqrt(rho) x_j) / sqrt(1 - rho))**d for each a.

    ``nodes``/``weights`` are Gauss-Hermite rules already rescaled to the
    standard normal weight (nodes * sqrt(2), weights / sqrt(pi)).
    """
    a = np.asarray(a, dtype=np.float64)
    out = np.empty_like(a)
    step = max(1, _BLOCK // max(1, nodes.size))
    shift = sqrt_rho * nodes
    for lo in range(0, a.size, step):
        blk = a[lo:lo + step, None]
        z = (blk - shift) / sqrt_1m_rho
        out[lo:lo + step] = ndtr(z) ** d @ weights
    return out


def equicorr_diag_deriv(a, nodes, weights, sqrt_rho, sqrt_1m_rho, d):
    """Derivative in ``a`` of :func:`equicorr_diag`."""
    a = np.asarray(a, dtype=np.float64)
    out = np.empty_like(a)
    step = max(1, _BLOCK // max(1, nodes.size))
    shift = sqrt_rho * nodes
    c = d / (sqrt_1m_rho * math.sqrt(2.0 * math.pi))
    for lo in range(0, a.size, step):
        blk = a[lo:lo + step, None]
        z = (blk - shift) / sqrt_1m_rho
        dens = np.exp(-0.5 * z * z)
        out[lo:lo + step] = c * (ndtr(z) ** (d - 1) * dens) @ weights
    return out


def pwl_eval(kt, kv, t):
    """Piecewise-linear interpolation through knots (kt strictly increasing)."""
    return np.interp(np.asarray(t, dtype=np.float64), kt, kv)


def pwl_inverse(kt, kv, y):
    """Generalized inverse inf{s : f(s) >= y} of a nondecreasing piecewise-linear f.

    Flat stretches map to their left end.
    """
    y = np.asarray(y, dtype=np.float64)
    k = np.searchsorted(kv, y, side="left")
    out = np.empty_like(y)
    first = k == 0
    out[first] = kt[0]
    beyond = k >= kv.size
    out[beyond] = kt[-1]
    mid = ~first & ~beyond
    km = k[mid]
    t0, t1 = kt[km - 1], kt[km]
    v0, v1 = kv[km - 1], kv[km]
    s = t0 + (y[mid] - v0) * (t1 - t0) / (v1 - v0)
    out[mid] = np.minimum(np.maximum(s, t0), t1)
    return out


def hermite_invert(ka, kg, kdg, v):
    """Invert a monotone cubic Hermite interpolant through (ka, kg) with slopes kdg.

    For each v, finds the knot interval with kg[k-1] < v <= kg[k] and solves the
    cubic there by bracketed Newton. Values outside the table clamp to its ends.
    """
    v = np.asarray(v, dtype=np.float64)
    m = ka.size
    k = np.clip(np.searchsorted(kg, v, side="left"), 1, m - 1)
    a0, a1 = ka[k - 1], ka[k]
    h = a1 - a0
    g0, g1 = kg[k - 1], kg[k]
    m0, m1 = kdg[k - 1] * h, kdg[k] * h
    target = np.clip(v, g0, g1)
    lo = np.zeros_like(v)
    hi = np.ones_like(v)
    span = g1 - g0
    s = np.where(span > 0, (target - g0) / np.where(span > 0, span, 1.0), 0.0)
    for _ in range(60):
        s2 = s * s
        s3 = s2 * s
        val = ((2 * s3 - 3 * s2 + 1) * g0 + (s3 - 2 * s2 + s) * m0
               + (-2 * s3 + 3 * s2) * g1 + (s3 - s2) * m1)
        der = ((6 * s2 - 6 * s) * g0 + (3 * s2 - 4 * s + 1) * m0
               + (-6 * s2 + 6 * s) * g1 + (3 * s2 - 2 * s) * m1)
        f = val - target
        lo = np.where(f < 0, s, lo)
        hi = np.where(f >= 0, s, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            nxt = s - f / der
        bad = ~np.isfinite(nxt) | (nxt <= lo) | (nxt >= hi)
        nxt = np.where(bad, 0.5 * (lo + hi), nxt)
        done = np.abs(nxt - s) <= 1e-15
        s = nxt
        if done.all():
            break
    return a0 + s * h


def window_count(samples, lo, hi):
    """Number of samples in the half-open window (lo, hi]."""
    s = np.asarray(samples)
    return int(np.count_nonzero((s > lo) & (s <= hi)))
