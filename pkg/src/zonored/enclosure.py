"""Layer image enclosure: exact for linear layers, six-step over-approximation
for activation layers.

Activation layers are enclosed neuron-wise: project the input set onto each
dimension, take its interval hull, fit a regression line to the activation
over those bounds, bound the fit error, evaluate the input set on the line,
and add the stacked error intervals as fresh generators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .activations import ActivationKind
from .intervals import IntervalVector
from .zonotopes import Zonotope, linear_map

FIT_SAMPLES = 20
ERR_SAMPLES = 100


@dataclass(frozen=True)
class NeuronApproximation:
    """Linear approximation of one activation neuron over its input bounds,
    with a sound error interval: sigma(x) - (slope*x + intercept) stays in
    [error_lo, error_hi] for all x in [input_lo, input_hi]."""

    slope: float
    intercept: float
    error_lo: float
    error_hi: float
    input_lo: float
    input_hi: float


def approximate_neuron(
    kind: ActivationKind,
    lo: float,
    hi: float,
    fit_samples: int = FIT_SAMPLES,
    err_samples: int = ERR_SAMPLES,
) -> NeuronApproximation:
    if lo > hi:
        raise ValueError(f"lower bound {lo} exceeds upper bound {hi}")
    lam, mu, dlo, dhi = kernels.approximate_layer(
        kind, np.array([lo]), np.array([hi]), fit_samples, err_samples
    )
    return NeuronApproximation(
        float(lam[0]), float(mu[0]), float(dlo[0]), float(dhi[0]), float(lo), float(hi)
    )


def enclose_linear(W, b, H: Zonotope) -> Zonotope:
    """Exact image of H under the linear layer.  ``b`` may be an
    IntervalVector (merged bias): the zonotope is mapped with the interval's
    center and the residual box is added per the interval-addition rule."""
    if isinstance(b, IntervalVector):
        c = b.center()
        out = linear_map(W, c, H)
        resid = IntervalVector(b.lower - c, b.upper - c)
        return out.add_interval(resid)
    return linear_map(W, b, H)


def enclose_activation(
    kind: ActivationKind,
    H: Zonotope,
    fit_samples: int = FIT_SAMPLES,
    err_samples: int = ERR_SAMPLES,
) -> tuple[Zonotope, IntervalVector]:
    """Over-approximate the image of H under an element-wise activation.

    Returns the output zonotope and the per-neuron input bounds (the interval
    hull of H), which the verifier reuses to tighten the next look-ahead.
    """
    bounds = H.interval_hull()
    lam, mu, dlo, dhi = kernels.approximate_layer(
        kind, bounds.lower, bounds.upper, fit_samples, err_samples
    )
    out = Zonotope(lam * H.center + mu, lam[:, None] * H.generators)
    out = out.add_interval(IntervalVector(dlo, dhi))
    return out, bounds
