# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled per-neuron approximation kernel.

Mirrors ``_fallback.approximate_layer``: same sample placement and formulas,
plain C loops instead of numpy temporaries.  No -ffast-math style shortcuts;
IEEE semantics are load-bearing for soundness.
"""

from libc.math cimport exp, tanh, fabs

import numpy as np
cimport numpy as cnp

cnp.import_array()

DEF KIND_RELU = 0
DEF KIND_SIGMOID = 1
DEF KIND_TANH = 2


cdef inline double _sigmoid(double x) nogil:
    cdef double e
    if x >= 0.0:
        return 1.0 / (1.0 + exp(-x))
    e = exp(x)
    return e / (1.0 + e)


cdef inline double _act(int code, double x) nogil:
    if code == KIND_RELU:
        return x if x > 0.0 else 0.0
    if code == KIND_SIGMOID:
        return _sigmoid(x)
    return tanh(x)


def approximate_layer(int code, const double[::1] lower, const double[::1] upper,
                      int fit_samples, int err_samples):
    cdef Py_ssize_t n = lower.shape[0]
    out_slope = np.zeros(n)
    out_intercept = np.empty(n)
    out_lo = np.zeros(n)
    out_hi = np.zeros(n)
    cdef double[::1] slope = out_slope
    cdef double[::1] intercept = out_intercept
    cdef double[::1] err_lo = out_lo
    cdef double[::1] err_hi = out_hi

    cdef double lipschitz
    if code == KIND_SIGMOID:
        lipschitz = 0.25
    else:
        lipschitz = 1.0

    cdef Py_ssize_t i, j
    cdef double l, u, step, h, x, y
    cdef double x_sum, y_sum, x_mean, y_mean, sxx, sxy, lam, mu
    cdef double d, d_l, d_u, lo, hi, pad

    with nogil:
        for i in range(n):
            l = lower[i]
            u = upper[i]
            if u == l:
                slope[i] = 0.0
                intercept[i] = _act(code, l)
                err_lo[i] = 0.0
                err_hi[i] = 0.0
                continue

            step = (u - l) / (fit_samples - 1)
            x_sum = 0.0
            y_sum = 0.0
            for j in range(fit_samples):
                x = l + j * step
                x_sum += x
                y_sum += _act(code, x)
            x_mean = x_sum / fit_samples
            y_mean = y_sum / fit_samples
            sxx = 0.0
            sxy = 0.0
            for j in range(fit_samples):
                x = l + j * step
                y = _act(code, x)
                sxx += (x - x_mean) * (x - x_mean)
                sxy += (x - x_mean) * (y - y_mean)
            if sxx > 0.0:
                lam = sxy / sxx
            else:
                lam = 0.0
            mu = y_mean - lam * x_mean

            if code == KIND_RELU:
                d_l = (l if l > 0.0 else 0.0) - (lam * l + mu)
                d_u = (u if u > 0.0 else 0.0) - (lam * u + mu)
                if d_l < d_u:
                    lo = d_l
                    hi = d_u
                else:
                    lo = d_u
                    hi = d_l
                if l < 0.0 and u > 0.0:
                    if -mu < lo:
                        lo = -mu
                    if -mu > hi:
                        hi = -mu
            else:
                h = (u - l) / (err_samples - 1)
                lo = 1e308
                hi = -1e308
                for j in range(err_samples):
                    x = l + j * h
                    d = _act(code, x) - (lam * x + mu)
                    if d < lo:
                        lo = d
                    if d > hi:
                        hi = d
                pad = (lipschitz + fabs(lam)) * h / 2.0
                lo -= pad
                hi += pad

            slope[i] = lam
            intercept[i] = mu
            err_lo[i] = lo
            err_hi[i] = hi

    return out_slope, out_intercept, out_lo, out_hi
