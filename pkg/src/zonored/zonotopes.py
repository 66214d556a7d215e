"""Zonotopes: center + generator matrix, the set representation used for
verification.

A zonotope <c, G> is the set {c + G beta | beta in [-1, 1]^q}.  Operations
here are the ones the propagation needs: interval hull, Minkowski sum with a
box, exact linear maps, projections and support lower bounds.
"""

from __future__ import annotations

import numpy as np

from .intervals import IntervalVector


class Zonotope:
    __slots__ = ("center", "generators")

    def __init__(self, center, generators=None):
        center = np.array(center, dtype=float).reshape(-1)
        if generators is None:
            generators = np.zeros((center.size, 0))
        generators = np.array(generators, dtype=float)
        if generators.ndim == 1:
            generators = generators.reshape(1, -1)
        if generators.ndim != 2 or generators.shape[0] != center.size:
            raise ValueError(
                f"generator matrix {generators.shape} does not match center "
                f"dimension {center.size}"
            )
        center.setflags(write=False)
        generators.setflags(write=False)
        self.center = center
        self.generators = generators

    @classmethod
    def point(cls, center) -> "Zonotope":
        return cls(center)

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def num_generators(self) -> int:
        return self.generators.shape[1]

    def interval_hull(self) -> IntervalVector:
        """Tightest box containing the zonotope: c -+ sum_j |G(:,j)|."""
        dg = np.abs(self.generators).sum(axis=1)
        return IntervalVector(self.center - dg, self.center + dg)

    def add_interval(self, box: IntervalVector) -> "Zonotope":
        """Minkowski sum with a box: shift by the box center, append one
        generator column per dimension (zero columns for zero-width
        components; pruning is a separate, optional step)."""
        if box.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {box.dim}")
        ci = box.center()
        fresh = np.diag(box.upper - ci)
        return Zonotope(self.center + ci, np.hstack([self.generators, fresh]))

    def project(self, i: int) -> "Zonotope":
        """One-dimensional zonotope of component ``i`` (0-based)."""
        if not 0 <= i < self.dim:
            raise IndexError(f"component {i} out of range for dim {self.dim}")
        return Zonotope(self.center[i : i + 1], self.generators[i : i + 1, :])

    def prune_zero_generators(self) -> "Zonotope":
        """Drop all-zero generator columns; hull and support values are
        unaffected."""
        if self.num_generators == 0:
            return self
        keep = np.any(self.generators != 0.0, axis=0)
        if keep.all():
            return self
        return Zonotope(self.center, self.generators[:, keep])

    def sample(self, beta: np.ndarray) -> np.ndarray:
        """Concrete points c + G beta for coefficient rows beta in [-1,1]^q."""
        beta = np.asarray(beta, dtype=float)
        return self.center + beta @ self.generators.T

    def __repr__(self):
        return f"Zonotope(dim={self.dim}, num_generators={self.num_generators})"


def linear_map(W, b, Z: Zonotope) -> Zonotope:
    """Exact image <W c + b, W G> of the zonotope under an affine map."""
    W = np.asarray(W, dtype=float)
    b = np.asarray(b, dtype=float)
    if W.ndim != 2 or W.shape[1] != Z.dim:
        raise ValueError(f"W shape {W.shape} does not match zonotope dim {Z.dim}")
    if b.shape != (W.shape[0],):
        raise ValueError(f"bias shape {b.shape} does not match {W.shape[0]} rows")
    return Zonotope(W @ Z.center + b, W @ Z.generators)


def halfspace_lower_bound(a, Z: Zonotope) -> float:
    """Exact minimum of a . y over y in Z: a.c - sum_j |a . G(:,j)|."""
    a = np.asarray(a, dtype=float).reshape(-1)
    if a.size != Z.dim:
        raise ValueError(f"direction dim {a.size} does not match {Z.dim}")
    return float(a @ Z.center - np.abs(a @ Z.generators).sum())
