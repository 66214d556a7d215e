#!/usr/bin/env python3
"""Convert a fully-connected network in the ERAN text format to the JSON
model schema.

The text format alternates an activation name line ("ReLU" / "Sigmoid" /
"Tanh" / "Affine") with bracketed weight-matrix and bias lines.  Only
fully-connected layers are supported; convolutional networks must be lowered
to linear layers first.  Untested in CI; used by the optional external
benchmark spot check only.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

KIND_MAP = {"relu": "relu", "sigmoid": "sigmoid", "tanh": "tanh"}


def _parse_array(text: str) -> np.ndarray:
    from ast import literal_eval

    try:
        return np.array(json.loads(text), dtype=float)
    except json.JSONDecodeError:
        return np.array(literal_eval(text), dtype=float)


def parse_eran_text(path: Path) -> dict:
    lines = [ln.strip() for ln in path.read_text().splitlines() if ln.strip()]
    layers = []
    i = 0
    while i < len(lines):
        head = lines[i].lower()
        if head not in KIND_MAP and head != "affine":
            raise ValueError(f"line {i + 1}: unsupported layer header {lines[i]!r}")
        W = _parse_array(lines[i + 1])
        b = _parse_array(lines[i + 2])
        layers.append({"type": "linear", "weights": np.atleast_2d(W).tolist(),
                       "bias": b.reshape(-1).tolist()})
        if head in KIND_MAP:
            layers.append({"type": "activation", "kind": KIND_MAP[head]})
        i += 3
    return {"name": path.stem, "layers": layers}


def convert(src: Path, dst: Path) -> Path:
    doc = parse_eran_text(Path(src))
    with open(dst, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")
    return dst


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("src", type=Path)
    parser.add_argument("dst", type=Path)
    args = parser.parse_args()
    convert(args.src, args.dst)
    print(f"wrote {args.dst}")


if __name__ == "__main__":
    sys.exit(main())
