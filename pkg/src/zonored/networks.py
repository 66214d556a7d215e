"""Feed-forward network model: alternating linear and activation layers,
JSON ingestion, and an exact forward pass used as the concrete oracle.

Model file schema::

    { "name": "...",
      "layers": [ {"type": "linear", "weights": [[...]], "bias": [...]},
                  {"type": "activation", "kind": "relu"|"sigmoid"|"tanh"},
                  ... ] }

Weight row i corresponds to output neuron i.  Consecutive linear layers in a
source file are fused on load; a trailing linear layer without a following
activation is retained (common for classifiers).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .activations import ActivationKind, apply


class ParseError(Exception):
    """Malformed model or instance file."""


class ShapeError(Exception):
    """Layer shapes do not chain; the message names the offending layer."""


class UnknownActivation(Exception):
    pass


@dataclass(frozen=True)
class LinearLayer:
    W: np.ndarray
    b: np.ndarray

    @property
    def out_dim(self) -> int:
        return self.W.shape[0]

    @property
    def in_dim(self) -> int:
        return self.W.shape[1]


@dataclass(frozen=True)
class ActivationLayer:
    kind: ActivationKind
    width: int


Layer = LinearLayer | ActivationLayer


class Network:
    """Validated network: strictly alternating linear/activation layers
    starting with a linear layer, optionally ending with a trailing linear
    layer.  Immutable after construction; the verifier reduces its own
    working copy."""

    def __init__(self, layers, name: str = "network"):
        layers = tuple(layers)
        if not layers:
            raise ShapeError("network has no layers")
        if not isinstance(layers[0], LinearLayer):
            raise ShapeError("layer 1 must be linear (initial activation layers are rejected)")
        width = layers[0].in_dim
        for idx, layer in enumerate(layers, start=1):
            if isinstance(layer, LinearLayer):
                if idx > 1 and isinstance(layers[idx - 2], LinearLayer):
                    raise ShapeError(f"layer {idx}: consecutive linear layers (fuse on load)")
                if layer.W.shape[1] != width:
                    raise ShapeError(
                        f"layer {idx}: weight matrix expects {layer.W.shape[1]} inputs, "
                        f"previous layer outputs {width}"
                    )
                if layer.b.shape != (layer.W.shape[0],):
                    raise ShapeError(
                        f"layer {idx}: bias has {layer.b.shape[0]} entries, "
                        f"weights have {layer.W.shape[0]} rows"
                    )
                width = layer.out_dim
            elif isinstance(layer, ActivationLayer):
                if not isinstance(layers[idx - 2], LinearLayer):
                    raise ShapeError(f"layer {idx}: activation must follow a linear layer")
                if layer.width != width:
                    raise ShapeError(
                        f"layer {idx}: activation width {layer.width} != {width}"
                    )
            else:
                raise ShapeError(f"layer {idx}: unknown layer object {type(layer)!r}")
        self.layers = layers
        self.name = name

    @property
    def input_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def output_dim(self) -> int:
        last = self.layers[-1]
        return last.out_dim if isinstance(last, LinearLayer) else last.width

    @property
    def trailing_linear(self) -> LinearLayer | None:
        last = self.layers[-1]
        return last if isinstance(last, LinearLayer) else None

    def pairs(self) -> list[tuple[LinearLayer, ActivationLayer]]:
        """(linear, activation) pairs, excluding any trailing linear layer."""
        out = []
        for i in range(0, len(self.layers) - 1, 2):
            out.append((self.layers[i], self.layers[i + 1]))
        return out

    def eval(self, x) -> np.ndarray:
        """Exact forward pass.  ``x`` is one input vector or a batch with one
        input per row."""
        h = np.asarray(x, dtype=float)
        if h.shape[-1] != self.input_dim:
            raise ShapeError(
                f"input has {h.shape[-1]} components, network expects {self.input_dim}"
            )
        for layer in self.layers:
            if isinstance(layer, LinearLayer):
                h = h @ layer.W.T + layer.b
            else:
                h = apply(layer.kind, h)
        return h

    def neuron_counts(self) -> tuple[int, ...]:
        """Widths v_0 .. v_K."""
        counts = [self.input_dim]
        for layer in self.layers:
            counts.append(layer.out_dim if isinstance(layer, LinearLayer) else layer.width)
        return tuple(counts)

    def __repr__(self):
        return f"Network({self.name!r}, widths={self.neuron_counts()})"


def _parse_matrix(raw, layer_idx: int) -> np.ndarray:
    try:
        W = np.array(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"layer {layer_idx}: weights are not a rectangular matrix") from exc
    if W.ndim != 2 or W.size == 0:
        raise ParseError(f"layer {layer_idx}: weights are not a nonempty matrix")
    if not np.all(np.isfinite(W)):
        raise ParseError(f"layer {layer_idx}: non-finite weight entries")
    W.setflags(write=False)
    return W


def _parse_vector(raw, layer_idx: int) -> np.ndarray:
    try:
        b = np.array(raw, dtype=float).reshape(-1)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"layer {layer_idx}: bias is not a vector") from exc
    if not np.all(np.isfinite(b)):
        raise ParseError(f"layer {layer_idx}: non-finite bias entries")
    b.setflags(write=False)
    return b


def from_dict(doc: dict) -> Network:
    """Build a validated network from a parsed model document, fusing
    consecutive linear layers (W2 W1, W2 b1 + b2)."""
    if not isinstance(doc, dict) or "layers" not in doc:
        raise ParseError("model document has no 'layers' list")
    raw_layers = doc["layers"]
    if not isinstance(raw_layers, list) or not raw_layers:
        raise ParseError("'layers' must be a nonempty list")

    layers: list[Layer] = []
    pending: tuple[np.ndarray, np.ndarray] | None = None
    for idx, raw in enumerate(raw_layers, start=1):
        if not isinstance(raw, dict) or "type" not in raw:
            raise ParseError(f"layer {idx}: missing 'type'")
        kind = raw["type"]
        if kind == "linear":
            W = _parse_matrix(raw.get("weights"), idx)
            b = _parse_vector(raw.get("bias"), idx)
            if W.shape[0] != b.size:
                raise ShapeError(
                    f"layer {idx}: weights have {W.shape[0]} rows but bias has {b.size} entries"
                )
            if pending is not None:
                Wp, bp = pending
                if W.shape[1] != Wp.shape[0]:
                    raise ShapeError(
                        f"layer {idx}: expects {W.shape[1]} inputs, previous linear outputs "
                        f"{Wp.shape[0]}"
                    )
                pending = (W @ Wp, W @ bp + b)
            else:
                pending = (W, b)
        elif kind == "activation":
            name = raw.get("kind")
            try:
                act = ActivationKind(name)
            except ValueError:
                raise UnknownActivation(f"layer {idx}: unknown activation kind {name!r}") from None
            if pending is None:
                raise ParseError(f"layer {idx}: activation layer has no preceding linear layer")
            W, b = pending
            layers.append(LinearLayer(W, b))
            layers.append(ActivationLayer(act, W.shape[0]))
            pending = None
        else:
            raise ParseError(f"layer {idx}: unknown layer type {kind!r}")
    if pending is not None:
        W, b = pending
        layers.append(LinearLayer(W, b))
    return Network(layers, name=str(doc.get("name", "network")))


def load(path) -> Network:
    """Load and validate a model file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read model file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    return from_dict(doc)


def to_dict(net: Network) -> dict:
    layers = []
    for layer in net.layers:
        if isinstance(layer, LinearLayer):
            layers.append(
                {"type": "linear", "weights": layer.W.tolist(), "bias": layer.b.tolist()}
            )
        else:
            layers.append({"type": "activation", "kind": layer.kind.value})
    return {"name": net.name, "layers": layers}


def save(net: Network, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_dict(net), fh)
        fh.write("\n")
