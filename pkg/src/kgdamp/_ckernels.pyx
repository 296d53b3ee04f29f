# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Signatures mirror ``_pykernels`` exactly.

Complex arrays are walked as interleaved ``(re, im)`` float64 pairs.
Non-even-integer exponents are handed to the numpy versions.
"""
import numpy as np

from libc.math cimport isfinite

from . import _pykernels


cdef inline object _flat_complex(values):
    arr = np.ascontiguousarray(values, dtype=np.complex128)
    return arr, arr.reshape(-1).view(np.float64)


cdef inline object _flat_real(values):
    return np.ascontiguousarray(values, dtype=np.float64).reshape(-1)


cdef inline int _even_power(double p):
    """``p / 2`` when ``p`` is an even integer in [0, 16], else -1."""
    if 0.0 <= p <= 16.0 and p == <int>p and (<int>p) % 2 == 0:
        return (<int>p) // 2
    return -1


def power_nonlinearity(values, double p):
    cdef int m = _even_power(p)
    if m < 0:
        # vectorized libm power in numpy beats a scalar pow loop
        return _pykernels.power_nonlinearity(values, p)
    arr, flat = _flat_complex(values)
    out = np.empty_like(arr)
    cdef const double[::1] z = flat
    cdef double[::1] o = out.reshape(-1).view(np.float64)
    cdef Py_ssize_t i, n = z.shape[0] // 2
    cdef int k
    cdef double re, im, m2, s
    with nogil:
        for i in range(n):
            re = z[2 * i]
            im = z[2 * i + 1]
            m2 = re * re + im * im
            s = 1.0
            for k in range(m):
                s = s * m2
            o[2 * i] = re * s
            o[2 * i + 1] = im * s
    return out


def advance(prev, curr, nl, inv_a, c, lin):
    _, fp = _flat_complex(prev)
    c_arr, fc = _flat_complex(curr)
    _, fn = _flat_complex(nl)
    out = np.empty_like(c_arr)
    cdef const double[::1] pv = fp
    cdef const double[::1] cv = fc
    cdef const double[::1] nv = fn
    cdef double[::1] o = out.reshape(-1).view(np.float64)
    cdef const double[::1] ia = _flat_real(inv_a)
    cdef const double[::1] cc = _flat_real(c)
    cdef const double[::1] ll = _flat_real(lin)
    cdef Py_ssize_t i, n = ia.shape[0]
    cdef double re, im, ci, li, ai
    with nogil:
        for i in range(n):
            re = cv[2 * i]
            im = cv[2 * i + 1]
            ci = cc[i]
            li = ll[i]
            ai = ia[i]
            o[2 * i] = re + (ci * (re - pv[2 * i]) - li * re - nv[2 * i]) * ai
            o[2 * i + 1] = im + (ci * (im - pv[2 * i + 1]) - li * im - nv[2 * i + 1]) * ai
    return out


def weighted_sum_sq(coeffs, weights):
    _, flat = _flat_complex(coeffs)
    cdef const double[::1] cv = flat
    cdef const double[::1] w = _flat_real(weights)
    cdef Py_ssize_t i, n = w.shape[0]
    cdef double acc = 0.0
    with nogil:
        for i in range(n):
            acc += w[i] * (cv[2 * i] * cv[2 * i] + cv[2 * i + 1] * cv[2 * i + 1])
    return acc


def abs_power_sum(values, double q):
    cdef int m = _even_power(q)
    if m < 0:
        return _pykernels.abs_power_sum(values, q)
    _, flat = _flat_complex(values)
    cdef const double[::1] z = flat
    cdef Py_ssize_t i, n = z.shape[0] // 2
    cdef int k
    cdef double acc = 0.0, m2, s
    with nogil:
        for i in range(n):
            m2 = z[2 * i] * z[2 * i] + z[2 * i + 1] * z[2 * i + 1]
            s = 1.0
            for k in range(m):
                s = s * m2
            acc += s
    return acc


def all_finite(values):
    _, flat = _flat_complex(values)
    cdef const double[::1] z = flat
    cdef Py_ssize_t i, n = z.shape[0]
    cdef double acc = 0.0
    with nogil:
        # inf/nan propagate through the sum; inf - inf also yields nan
        for i in range(n):
            acc += z[i] * 0.0
    return bool(isfinite(acc))
