"""Vectorized numpy implementation of the per-neuron approximation kernel.

Kept semantically identical to the compiled core in ``_native.pyx``: same
sample placement (l + j*h), same regression formulas, same error padding.
Results may differ from the compiled core by summation-order rounding only.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

_RELU, _SIGMOID, _TANH = 0, 1, 2
# Global derivative bounds, indexed by kind code.
_LIPSCHITZ = (1.0, 0.25, 1.0)


def _act(code: int, x: np.ndarray) -> np.ndarray:
    if code == _RELU:
        return np.maximum(x, 0.0)
    if code == _SIGMOID:
        return expit(x)
    return np.tanh(x)


def approximate_layer(code, lower, upper, fit_samples, err_samples):
    n = lower.size
    slope = np.zeros(n)
    intercept = np.empty(n)
    err_lo = np.zeros(n)
    err_hi = np.zeros(n)

    degenerate = upper == lower
    if degenerate.any():
        intercept[degenerate] = _act(code, lower[degenerate])
    active = ~degenerate
    if not active.any():
        return slope, intercept, err_lo, err_hi

    l = lower[active]
    u = upper[active]

    # Least-squares line through fit_samples evenly spaced points.
    steps = (u - l) / (fit_samples - 1)
    xs = l[:, None] + np.arange(fit_samples)[None, :] * steps[:, None]
    ys = _act(code, xs)
    x_mean = xs.sum(axis=1) / fit_samples
    y_mean = ys.sum(axis=1) / fit_samples
    dx = xs - x_mean[:, None]
    sxx = (dx * dx).sum(axis=1)
    sxy = (dx * (ys - y_mean[:, None])).sum(axis=1)
    # sxx can underflow to 0 for near-degenerate bounds; a flat line is sound.
    safe = sxx > 0.0
    lam = np.where(safe, sxy / np.where(safe, sxx, 1.0), 0.0)
    mu = y_mean - lam * x_mean

    if code == _RELU:
        # d(x) = relu(x) - (lam x + mu) is piecewise linear with a breakpoint
        # at 0; its extremes over [l, u] lie in {l, 0, u}.
        d_l = np.maximum(l, 0.0) - (lam * l + mu)
        d_u = np.maximum(u, 0.0) - (lam * u + mu)
        lo = np.minimum(d_l, d_u)
        hi = np.maximum(d_l, d_u)
        crosses = (l < 0.0) & (u > 0.0)
        lo = np.where(crosses, np.minimum(lo, -mu), lo)
        hi = np.where(crosses, np.maximum(hi, -mu), hi)
    else:
        h = (u - l) / (err_samples - 1)
        grid = l[:, None] + np.arange(err_samples)[None, :] * h[:, None]
        d = _act(code, grid) - (lam[:, None] * grid + mu[:, None])
        pad = (_LIPSCHITZ[code] + np.abs(lam)) * h / 2.0
        lo = d.min(axis=1) - pad
        hi = d.max(axis=1) + pad

    slope[active] = lam
    intercept[active] = mu
    err_lo[active] = lo
    err_hi[active] = hi
    return slope, intercept, err_lo, err_hi
