# cython: language_level=3
"""Compiled twins of the kernels in ``_kernels_py``.

Signatures and semantics match the numpy versions exactly; see that module
for the documentation of each function.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport erfc, exp, fabs, isfinite, lgamma, log, sqrt, M_PI
from cython.parallel cimport prange

cnp.import_array()

BACKEND = "cython"

cdef double _EPS = 2.0 ** -53
cdef double _TINY = 1e-300
cdef int _MAX_ITER = 10000
cdef double _INV_SQRT2 = 0.7071067811865476


cdef inline double _ndtr(double z) nogil:
    return 0.5 * erfc(-z * _INV_SQRT2)


cdef inline double _ipow(double base, long n) nogil:
    cdef double result = 1.0
    while n > 0:
        if n & 1:
            result *= base
        base *= base
        n >>= 1
    return result


cdef double _gamma_p_series(double a, double x) nogil:
    cdef double ap = a
    cdef double term = 1.0 / a
    cdef double total = term
    cdef int i
    for i in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if fabs(term) < fabs(total) * _EPS:
            break
    return total * exp(a * log(x) - x - lgamma(a))


cdef double _gamma_q_cf(double a, double x) nogil:
    cdef double b = x + 1.0 - a
    cdef double c = 1.0 / _TINY
    cdef double dd = 1.0 / b
    cdef double h = dd
    cdef double an, delta
    cdef int i
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        dd = an * dd + b
        if fabs(dd) < _TINY:
            dd = _TINY
        c = b + an / c
        if fabs(c) < _TINY:
            c = _TINY
        dd = 1.0 / dd
        delta = dd * c
        h *= delta
        if fabs(delta - 1.0) < _EPS:
            break
    return h * exp(a * log(x) - x - lgamma(a))


def gamma_pq(double a, x):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xs = np.ascontiguousarray(
        np.asarray(x, dtype=np.float64).ravel())
    shape = np.shape(x)
    cdef Py_ssize_t n = xs.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] p = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] q = np.empty(n)
    cdef double xi
    cdef Py_ssize_t i
    for i in range(n):
        xi = xs[i]
        if not (xi > 0.0):
            p[i] = 0.0
            q[i] = 1.0
        elif not isfinite(xi):
            p[i] = 1.0
            q[i] = 0.0
        elif xi < a + 1.0:
            p[i] = _gamma_p_series(a, xi)
            q[i] = 1.0 - p[i]
        else:
            q[i] = _gamma_q_cf(a, xi)
            p[i] = 1.0 - q[i]
    return p.reshape(shape), q.reshape(shape)


def equicorr_diag(a, cnp.ndarray[cnp.float64_t, ndim=1] nodes,
                  cnp.ndarray[cnp.float64_t, ndim=1] weights,
                  double sqrt_rho, double sqrt_1m_rho, long d):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] av = np.ascontiguousarray(
        np.asarray(a, dtype=np.float64).ravel())
    shape = np.shape(a)
    cdef Py_ssize_t n = av.shape[0]
    cdef Py_ssize_t m = nodes.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double[::1] av_v = av
    cdef double[::1] out_v = out
    cdef double[::1] x_v = np.ascontiguousarray(nodes)
    cdef double[::1] w_v = np.ascontiguousarray(weights)
    cdef Py_ssize_t i, j
    cdef double acc, z
    for i in prange(n, nogil=True, schedule="static"):
        acc = 0.0
        for j in range(m):
            z = (av_v[i] - sqrt_rho * x_v[j]) / sqrt_1m_rho
            acc = acc + w_v[j] * _ipow(_ndtr(z), d)
        out_v[i] = acc
    return out.reshape(shape)


def equicorr_diag_deriv(a, cnp.ndarray[cnp.float64_t, ndim=1] nodes,
                        cnp.ndarray[cnp.float64_t, ndim=1] weights,
                        double sqrt_rho, double sqrt_1m_rho, long d):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] av = np.ascontiguousarray(
        np.asarray(a, dtype=np.float64).ravel())
    shape = np.shape(a)
    cdef Py_ssize_t n = av.shape[0]
    cdef Py_ssize_t m = nodes.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double[::1] av_v = av
    cdef double[::1] out_v = out
    cdef double[::1] x_v = np.ascontiguousarray(nodes)
    cdef double[::1] w_v = np.ascontiguousarray(weights)
    cdef double c = d / (sqrt_1m_rho * sqrt(2.0 * M_PI))
    cdef Py_ssize_t i, j
    cdef double acc, z
    for i in prange(n, nogil=True, schedule="static"):
        acc = 0.0
        for j in range(m):
            z = (av_v[i] - sqrt_rho * x_v[j]) / sqrt_1m_rho
            acc = acc + w_v[j] * _ipow(_ndtr(z), d - 1) * exp(-0.5 * z * z)
        out_v[i] = c * acc
    return out.reshape(shape)


def pwl_eval(cnp.ndarray[cnp.float64_t, ndim=1] kt,
             cnp.ndarray[cnp.float64_t, ndim=1] kv, t):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tv = np.ascontiguousarray(
        np.asarray(t, dtype=np.float64).ravel())
    shape = np.shape(t)
    cdef Py_ssize_t n = tv.shape[0]
    cdef Py_ssize_t m = kt.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef Py_ssize_t i, lo, hi, mid
    cdef double x, w
    for i in range(n):
        x = tv[i]
        if x <= kt[0]:
            out[i] = kv[0]
            continue
        if x >= kt[m - 1]:
            out[i] = kv[m - 1]
            continue
        lo = 0
        hi = m - 1
        while hi - lo > 1:
            mid = (lo + hi) >> 1
            if kt[mid] <= x:
                lo = mid
            else:
                hi = mid
        w = (x - kt[lo]) / (kt[hi] - kt[lo])
        out[i] = kv[lo] + w * (kv[hi] - kv[lo])
    return out.reshape(shape)


def pwl_inverse(cnp.ndarray[cnp.float64_t, ndim=1] kt,
                cnp.ndarray[cnp.float64_t, ndim=1] kv, y):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] yv = np.ascontiguousarray(
        np.asarray(y, dtype=np.float64).ravel())
    shape = np.shape(y)
    cdef Py_ssize_t n = yv.shape[0]
    cdef Py_ssize_t m = kt.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef Py_ssize_t i, lo, hi, mid
    cdef double x, s
    for i in range(n):
        x = yv[i]
        # first index k with kv[k] >= x
        lo = 0
        hi = m
        while lo < hi:
            mid = (lo + hi) >> 1
            if kv[mid] < x:
                lo = mid + 1
            else:
                hi = mid
        if lo == 0:
            out[i] = kt[0]
        elif lo >= m:
            out[i] = kt[m - 1]
        else:
            s = kt[lo - 1] + (x - kv[lo - 1]) * (kt[lo] - kt[lo - 1]) / (kv[lo] - kv[lo - 1])
            if s < kt[lo - 1]:
                s = kt[lo - 1]
            if s > kt[lo]:
                s = kt[lo]
            out[i] = s
    return out.reshape(shape)


def hermite_invert(cnp.ndarray[cnp.float64_t, ndim=1] ka,
                   cnp.ndarray[cnp.float64_t, ndim=1] kg,
                   cnp.ndarray[cnp.float64_t, ndim=1] kdg, v):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] vv = np.ascontiguousarray(
        np.asarray(v, dtype=np.float64).ravel())
    shape = np.shape(v)
    cdef Py_ssize_t n = vv.shape[0]
    cdef Py_ssize_t m = ka.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double[::1] ka_v = ka
    cdef double[::1] kg_v = kg
    cdef double[::1] kdg_v = kdg
    cdef double[::1] vv_v = vv
    cdef double[::1] out_v = out
    cdef Py_ssize_t i, k, lo_i, hi_i, mid
    cdef double a0, h, g0, g1, m0, m1, target, s, s2, s3, val, der, f, nxt, lo, hi
    cdef int it
    for i in prange(n, nogil=True, schedule="static"):
        lo_i = 0
        hi_i = m
        while lo_i < hi_i:
            mid = (lo_i + hi_i) >> 1
            if kg_v[mid] < vv_v[i]:
                lo_i = mid + 1
            else:
                hi_i = mid
        k = lo_i
        if k < 1:
            k = 1
        if k > m - 1:
            k = m - 1
        a0 = ka_v[k - 1]
        h = ka_v[k] - a0
        g0 = kg_v[k - 1]
        g1 = kg_v[k]
        m0 = kdg_v[k - 1] * h
        m1 = kdg_v[k] * h
        target = vv_v[i]
        if target < g0:
            target = g0
        if target > g1:
            target = g1
        if g1 > g0:
            s = (target - g0) / (g1 - g0)
        else:
            s = 0.0
        lo = 0.0
        hi = 1.0
        for it in range(60):
            s2 = s * s
            s3 = s2 * s
            val = ((2 * s3 - 3 * s2 + 1) * g0 + (s3 - 2 * s2 + s) * m0
                   + (-2 * s3 + 3 * s2) * g1 + (s3 - s2) * m1)
            der = ((6 * s2 - 6 * s) * g0 + (3 * s2 - 4 * s + 1) * m0
                   + (-6 * s2 + 6 * s) * g1 + (3 * s2 - 2 * s) * m1)
            f = val - target
            if f < 0:
                lo = s
            else:
                hi = s
            if der != 0.0:
                nxt = s - f / der
            else:
                nxt = -1.0
            if not isfinite(nxt) or nxt <= lo or nxt >= hi:
                nxt = 0.5 * (lo + hi)
            if fabs(nxt - s) <= 1e-15:
                s = nxt
                break
            s = nxt
        out_v[i] = a0 + s * h
    return out.reshape(shape)


def window_count(samples, double lo, double hi):
    cdef double[::1] s = np.ascontiguousarray(np.asarray(samples, dtype=np.float64).ravel())
    cdef Py_ssize_t n = s.shape[0]
    cdef Py_ssize_t i
    cdef long count = 0
    cdef double x
    with nogil:
        for i in range(n):
            x = s[i]
            count += (x > lo) & (x <= hi)
    return int(count)
