"""Interval-vector arithmetic.

Used for the cheap look-ahead bound propagation of the reduction loop and for
the interval-valued biases produced by neuron merging.  Plain IEEE double
arithmetic; no directed rounding.
"""

from __future__ import annotations

import numpy as np

from .activations import ActivationKind, apply

# Two sound over-approximations of the same nonempty set can only miss each
# other by rounding; intersections empty by at most this amount collapse to
# the midpoint instead of failing.
EPS_EMPTY = 1e-9


class EmptyIntersection(Exception):
    """Intersection empty beyond floating-point jitter: soundness bug or
    invalid inputs.  Callers should fall back to the un-tightened bound."""


def _freeze(x) -> np.ndarray:
    arr = np.array(x, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


class IntervalVector:
    """Axis-aligned box: per-dimension lower/upper bounds."""

    __slots__ = ("lower", "upper")

    def __init__(self, lower, upper):
        lower = _freeze(lower)
        upper = _freeze(upper)
        if lower.shape != upper.shape:
            raise ValueError(
                f"bound dimensions differ: {lower.shape} vs {upper.shape}"
            )
        if lower.size and bool(np.any(lower > upper)):
            i = int(np.argmax(lower - upper))
            raise ValueError(
                f"lower > upper at component {i}: [{lower[i]}, {upper[i]}]"
            )
        self.lower = lower
        self.upper = upper

    @classmethod
    def from_point(cls, x) -> "IntervalVector":
        x = np.asarray(x, dtype=float)
        return cls(x, x)

    @classmethod
    def from_center_radius(cls, center, radius) -> "IntervalVector":
        center = np.asarray(center, dtype=float)
        radius = np.broadcast_to(np.asarray(radius, dtype=float), center.shape)
        if np.any(radius < 0):
            raise ValueError("negative radius")
        return cls(center - radius, center + radius)

    @property
    def dim(self) -> int:
        return self.lower.size

    def center(self) -> np.ndarray:
        return (self.lower + self.upper) / 2.0

    def radius(self) -> np.ndarray:
        return (self.upper - self.lower) / 2.0

    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def select(self, indices) -> "IntervalVector":
        """Sub-box of the given components (used when merged rows are sliced)."""
        indices = np.asarray(indices, dtype=int)
        return IntervalVector(self.lower[indices], self.upper[indices])

    def add(self, other) -> "IntervalVector":
        """Minkowski sum with another box or a point vector."""
        if isinstance(other, IntervalVector):
            return IntervalVector(self.lower + other.lower, self.upper + other.upper)
        other = np.asarray(other, dtype=float)
        return IntervalVector(self.lower + other, self.upper + other)

    def contains(self, x, slack: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(
            np.all(x >= self.lower - slack) and np.all(x <= self.upper + slack)
        )

    def intersect(self, other: "IntervalVector", eps: float = EPS_EMPTY) -> "IntervalVector":
        """Component-wise intersection.

        Components empty by at most ``eps`` collapse to their midpoint;
        components empty by more raise :class:`EmptyIntersection`.
        """
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        lo = np.maximum(self.lower, other.lower)
        hi = np.minimum(self.upper, other.upper)
        gap = lo - hi
        worst = float(gap.max(initial=0.0))
        if worst > eps:
            i = int(np.argmax(gap))
            raise EmptyIntersection(
                f"component {i} disjoint by {worst:.3e} (> {eps:.1e})"
            )
        jitter = gap > 0
        if jitter.any():
            mid = (lo + hi) / 2.0
            lo = np.where(jitter, mid, lo)
            hi = np.where(jitter, mid, hi)
        return IntervalVector(lo, hi)

    def __repr__(self):
        return f"IntervalVector(lower={self.lower!r}, upper={self.upper!r})"


def affine_map(W, b, box: IntervalVector) -> IntervalVector:
    """Tight interval image of ``W x + b`` over ``x`` in the box.

    ``b`` may be a point vector or an :class:`IntervalVector` (interval-valued
    biases appear after neuron merging).  Result center is ``W c + b`` and
    result radius ``|W| r``, which is exact for interval inputs.
    """
    W = np.asarray(W, dtype=float)
    if W.ndim != 2:
        raise ValueError("W must be a matrix")
    if W.shape[1] != box.dim:
        raise ValueError(f"W has {W.shape[1]} columns, box has dim {box.dim}")
    bias_box = None
    if isinstance(b, IntervalVector):
        bias_box = b
        b = b.center()
    else:
        b = np.asarray(b, dtype=float)
    if b.shape != (W.shape[0],):
        raise ValueError(f"bias shape {b.shape} does not match {W.shape[0]} rows")
    c = W @ box.center() + b
    r = np.abs(W) @ box.radius()
    out = IntervalVector(c - r, c + r)
    if bias_box is not None:
        resid = IntervalVector(bias_box.lower - b, bias_box.upper - b)
        out = out.add(resid)
    return out


def activation_map(kind: ActivationKind, box: IntervalVector) -> IntervalVector:
    """Exact interval image of a monotone activation: [sigma(l), sigma(u)]."""
    return IntervalVector(apply(kind, box.lower), apply(kind, box.upper))
