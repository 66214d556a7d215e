import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_zonotope(rng, dim, num_generators, scale=1.0):
    from zonored import Zonotope

    c = rng.normal(0.0, scale, size=dim)
    G = rng.normal(0.0, scale, size=(dim, num_generators))
    return Zonotope(c, G)


def random_network(rng, depth_pairs, max_width, v0=None, kinds=("relu", "sigmoid", "tanh"),
                   trailing=False, weight_scale=1.0):
    """Random strictly alternating network, optionally with a trailing linear
    output layer."""
    from zonored import ActivationKind, ActivationLayer, LinearLayer, Network

    widths = [v0 or int(rng.integers(1, max_width + 1))]
    layers = []
    for _ in range(depth_pairs):
        w = int(rng.integers(1, max_width + 1))
        W = rng.normal(0.0, weight_scale / np.sqrt(widths[-1]), size=(w, widths[-1]))
        b = rng.normal(0.0, weight_scale, size=w)
        kind = ActivationKind(rng.choice(kinds))
        layers.append(LinearLayer(W, b))
        layers.append(ActivationLayer(kind, w))
        widths.append(w)
    if trailing:
        w = int(rng.integers(1, max_width + 1))
        W = rng.normal(0.0, weight_scale / np.sqrt(widths[-1]), size=(w, widths[-1]))
        b = rng.normal(0.0, weight_scale, size=w)
        layers.append(LinearLayer(W, b))
    return Network(layers)
