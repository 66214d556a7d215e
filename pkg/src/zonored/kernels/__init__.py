"""Per-neuron approximation kernels.

This is the hot loop of every activation-layer enclosure: for each neuron,
fit a regression line to the activation over its input bounds and bound the
approximation error.  A compiled (Cython) core is used when available; a
vectorized numpy fallback gives identical semantics.  Selection happens once
at import and can be forced with ZONORED_KERNEL=native|python.
"""

from __future__ import annotations

import os

import numpy as np

from ..activations import ActivationKind
from . import _fallback

KIND_CODE = {
    ActivationKind.RELU: 0,
    ActivationKind.SIGMOID: 1,
    ActivationKind.TANH: 2,
}

_requested = os.environ.get("ZONORED_KERNEL", "auto").lower()
if _requested not in ("auto", "native", "python"):
    raise RuntimeError(f"ZONORED_KERNEL must be auto, native or python, got {_requested!r}")

_impl = _fallback
BACKEND = "python"
if _requested in ("auto", "native"):
    try:
        from . import _native as _impl  # type: ignore[no-redef]

        BACKEND = "native"
    except ImportError:
        if _requested == "native":
            raise RuntimeError(
                "ZONORED_KERNEL=native but the compiled kernel is not built; "
                "run pip install -e . --no-build-isolation"
            ) from None


def approximate_layer(kind, lower, upper, fit_samples: int = 20, err_samples: int = 100):
    """Approximate one activation layer neuron-wise.

    Returns (slope, intercept, err_lo, err_hi) arrays such that for every
    neuron i and every x in [lower[i], upper[i]]:

        sigma(x) - (slope[i] * x + intercept[i])  in  [err_lo[i], err_hi[i]]

    slope/intercept come from least-squares regression over ``fit_samples``
    evenly spaced points (endpoints included).  ReLU error bounds are exact
    (piecewise-linear extreme points); sigmoid/tanh bounds sample
    ``err_samples`` points and pad by L_d * h / 2 with L_d the global
    derivative bound of the difference.
    """
    code = KIND_CODE[ActivationKind(kind)]
    lower = np.ascontiguousarray(lower, dtype=float).reshape(-1)
    upper = np.ascontiguousarray(upper, dtype=float).reshape(-1)
    if lower.shape != upper.shape:
        raise ValueError("lower/upper shapes differ")
    if lower.size and bool(np.any(lower > upper)):
        raise ValueError("lower > upper")
    if fit_samples < 2 or err_samples < 2:
        raise ValueError("need at least 2 fit and error samples")
    return _impl.approximate_layer(code, lower, upper, int(fit_samples), int(err_samples))
