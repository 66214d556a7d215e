"""Activation functions shared by the network model, the interval maps and the
enclosure kernels."""

from __future__ import annotations

import enum

import numpy as np
from scipy.special import expit


class ActivationKind(str, enum.Enum):
    RELU = "relu"
    SIGMOID = "sigmoid"
    TANH = "tanh"


# Global bounds on the derivative, used to pad sampled approximation errors.
DERIVATIVE_BOUND = {
    ActivationKind.RELU: 1.0,
    ActivationKind.SIGMOID: 0.25,
    ActivationKind.TANH: 1.0,
}


def apply(kind: ActivationKind, x):
    """Element-wise activation. All three kinds are monotonically increasing."""
    x = np.asarray(x, dtype=float)
    if kind is ActivationKind.RELU:
        return np.maximum(x, 0.0)
    if kind is ActivationKind.SIGMOID:
        return expit(x)
    if kind is ActivationKind.TANH:
        return np.tanh(x)
    raise ValueError(f"unsupported activation kind: {kind!r}")
