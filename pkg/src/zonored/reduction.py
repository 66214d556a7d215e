"""Merge buckets and the sound neuron-merging transformation.

A bucket collects the neurons of one activation layer whose output bounds all
fit inside [center - tol, center + tol].  Merging removes those neurons and
folds their possible outputs into an interval-valued bias of the following
linear layer, which keeps the reduced network a sound over-approximation of
the original.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .activations import ActivationKind
from .intervals import IntervalVector

# Asymptotic output values used as static bucket centers.
STATIC_CENTERS = {
    ActivationKind.RELU: (0.0,),
    ActivationKind.SIGMOID: (0.0, 1.0),
    ActivationKind.TANH: (-1.0, 1.0),
}


@dataclass(frozen=True)
class MergeBucket:
    center: float
    tolerance: float
    members: tuple[int, ...]
    layer_index: int = -1

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(self.members)))


BucketSet = list[MergeBucket]


def _fits(bounds: IntervalVector, w: int, center: float, delta: float) -> bool:
    return bounds.lower[w] >= center - delta and bounds.upper[w] <= center + delta


def check_disjoint(buckets: BucketSet, width: int) -> None:
    seen: set[int] = set()
    for bucket in buckets:
        for w in bucket.members:
            if not 0 <= w < width:
                raise IndexError(f"bucket member {w} out of range for width {width}")
            if w in seen:
                raise ValueError(f"neuron {w} appears in more than one bucket")
            seen.add(w)


def static_buckets(kind: ActivationKind, bounds: IntervalVector, delta: float) -> BucketSet:
    """Buckets centered at the activation's asymptotic values.

    A neuron joins the nearest center whose band contains its bounds (ties go
    to the smaller center).  Buckets with at most one member are dropped.
    """
    if delta < 0:
        raise ValueError("delta must be >= 0")
    centers = STATIC_CENTERS[ActivationKind(kind)]
    members: dict[float, list[int]] = {y: [] for y in centers}
    mid = bounds.center()
    for w in range(bounds.dim):
        fitting = [y for y in centers if _fits(bounds, w, y, delta)]
        if not fitting:
            continue
        best = min(fitting, key=lambda y: (abs(mid[w] - y), y))
        members[best].append(w)
    return [
        MergeBucket(y, delta, tuple(ws))
        for y, ws in members.items()
        if len(ws) > 1
    ]


def dynamic_buckets(bounds: IntervalVector, delta: float) -> BucketSet:
    """Buckets centered at per-neuron bound midpoints.

    Candidate centers are visited in index order; each unassigned neuron
    opens a bucket at its own midpoint and greedily captures every
    still-unassigned later neuron whose bounds fit.  Buckets with at most one
    member are dropped.
    """
    if delta < 0:
        raise ValueError("delta must be >= 0")
    n = bounds.dim
    mid = bounds.center()
    assigned = np.zeros(n, dtype=bool)
    buckets: BucketSet = []
    for w in range(n):
        if assigned[w]:
            continue
        center = float(mid[w])
        group = [
            v
            for v in range(w, n)
            if not assigned[v] and _fits(bounds, v, center, delta)
        ]
        if len(group) > 1:
            assigned[group] = True
            buckets.append(MergeBucket(center, delta, tuple(group)))
    return buckets


def merge(W_prev, b_prev, W_next, b_next, bounds: IntervalVector, buckets: BucketSet):
    """Remove the bucketed neurons of the activation layer between the two
    linear layers.

    Returns (W_prev_hat, b_prev_hat, W_next_hat, b_next_interval): the
    surviving rows of the preceding layer, the surviving columns of the
    following layer, and the following layer's bias as an IntervalVector that
    absorbs the merged neurons' output intervals (evaluated with interval
    arithmetic).
    """
    W_prev = np.asarray(W_prev, dtype=float)
    W_next = np.asarray(W_next, dtype=float)
    width = W_prev.shape[0]
    if bounds.dim != width or W_next.shape[1] != width:
        raise ValueError(
            f"shapes do not chain around the activation layer: "
            f"{W_prev.shape} / bounds {bounds.dim} / {W_next.shape}"
        )

    used = [b for b in buckets if len(b.members) > 1]
    check_disjoint(used, width)
    merged = sorted(w for b in used for w in b.members)
    keep = np.setdiff1d(np.arange(width), np.asarray(merged, dtype=int))

    W_prev_hat = W_prev[keep, :]
    if isinstance(b_prev, IntervalVector):
        b_prev_hat = b_prev.select(keep)
    else:
        b_prev_hat = np.asarray(b_prev, dtype=float)[keep]
    W_next_hat = W_next[:, keep]

    if merged:
        Wm = W_next[:, merged]
        box = bounds.select(merged)
        c = Wm @ box.center()
        r = np.abs(Wm) @ box.radius()
        extra = IntervalVector(c - r, c + r)
    else:
        zero = np.zeros(W_next.shape[0])
        extra = IntervalVector(zero, zero)
    if isinstance(b_next, IntervalVector):
        b_next_interval = b_next.add(extra)
    else:
        b_next_interval = extra.add(np.asarray(b_next, dtype=float))
    return W_prev_hat, b_prev_hat, W_next_hat, b_next_interval
