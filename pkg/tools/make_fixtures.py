#!/usr/bin/env python3
"""Regenerate the committed test corpora under tests/fixtures/.

Deterministic under fixed seeds.  Two corpora:

  sat_sigmoid_6x200/  six 200-neuron sigmoid layers whose neurons are mostly
                      bias-saturated (the regime where neuron merging shines),
                      plus 100 classification instances at radius 0.001.
  dead_relu_4x20/     four 20-neuron ReLU layers with exactly half the
                      neurons forced dead, plus 20 instances.

The generation law lives here and in the modelgen frontend; weights are
standard-scale (N(0, 1/sqrt(fan_in))) and saturation comes from large aligned
biases, so the networks stay verifiable at small perturbation radii.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from zonored import networks  # noqa: E402
from zonored.activations import ActivationKind  # noqa: E402


def round6(arr):
    return np.round(np.asarray(arr, dtype=float), 6)


def gen_sigmoid_net(rng, arch, scale=10.0, sat_frac=0.93):
    """Hidden layers: N(0, 1/sqrt(fan)) weights; a sat_frac share of neurons
    get a bias of magnitude U(0.6*scale, 1.4*scale) with random sign, which
    pins them at the activation asymptotes for inputs in [0, 1]^v0."""
    v0, hidden, out = arch[0], arch[1:-1], arch[-1]
    doc_layers = []
    prev = v0
    for width in hidden:
        W = rng.normal(0.0, 1.0 / np.sqrt(prev), size=(width, prev))
        sat = rng.uniform(size=width) < sat_frac
        signs = rng.choice([-1.0, 1.0], size=width)
        b = np.where(
            sat,
            signs * rng.uniform(0.6 * scale, 1.4 * scale, size=width),
            rng.normal(0.0, 0.5, size=width),
        )
        doc_layers.append(("linear", round6(W), round6(b)))
        doc_layers.append(("activation", "sigmoid"))
        prev = width
    W_out = round6(rng.normal(0.0, 2.0 / np.sqrt(prev), size=(out, prev)))
    doc_layers.append(("linear", W_out, np.zeros(out)))
    return doc_layers


def gen_dead_relu_net(rng, arch, dead_bias=-10.0, domain_radius=0.05):
    """Exactly half the neurons of every hidden layer get tiny weights and a
    strongly negative bias (dead for all reachable inputs); the alive half
    gets a bias lift that keeps it active over the whole input domain, so a
    zero-tolerance static bucket removes exactly the dead half."""
    v0, hidden, out = arch[0], arch[1:-1], arch[-1]
    doc_layers = []
    prev = v0
    lo = np.full(v0, -domain_radius)
    hi = np.full(v0, 1.0 + domain_radius)
    for width in hidden:
        dead = np.zeros(width, dtype=bool)
        dead[: width // 2] = True
        dead = rng.permutation(dead)
        W = rng.normal(0.0, 0.3 / np.sqrt(prev), size=(width, prev))
        W[dead] = rng.normal(0.0, 0.05 / np.sqrt(prev), size=(int(dead.sum()), prev))
        # Reachable-set interval of W x, used to pin both halves.
        c, r = (lo + hi) / 2.0, (hi - lo) / 2.0
        mid = W @ c
        rad = np.abs(W) @ r
        b = np.where(dead, dead_bias, rng.uniform(0.2, 0.8, size=width) - (mid - rad))
        W, b = round6(W), round6(b)
        doc_layers.append(("linear", W, b))
        doc_layers.append(("activation", "relu"))
        mid = W @ c + b
        rad = np.abs(W) @ r
        lo = np.maximum(mid - rad, 0.0)
        hi = np.maximum(mid + rad, 0.0)
        assert np.all(hi[dead] == 0.0) and np.all(lo[~dead] > 0.0)
        prev = width
    # The modest hidden weights attenuate input variation layer by layer; a
    # large output scale restores usable class margins (margin/width ratios
    # are invariant under output scaling).
    W_out = round6(rng.normal(0.0, 50.0 / np.sqrt(prev), size=(out, prev)))
    doc_layers.append(("linear", W_out, np.zeros(out)))
    return doc_layers


def recenter_output(doc_layers, rng, v0, probes=512):
    """Subtract the mean logits over random inputs so argmax labels vary."""
    net = build_network(doc_layers, "probe")
    xs = rng.uniform(0.0, 1.0, size=(probes, v0))
    mean = net.eval(xs).mean(axis=0)
    kind, W, b = doc_layers[-1]
    doc_layers[-1] = (kind, W, round6(b - mean))


def build_network(doc_layers, name):
    return networks.from_dict(to_model_doc(doc_layers, name))


def to_model_doc(doc_layers, name):
    layers = []
    for entry in doc_layers:
        if entry[0] == "linear":
            layers.append(
                {"type": "linear", "weights": entry[1].tolist(), "bias": entry[2].tolist()}
            )
        else:
            layers.append({"type": "activation", "kind": entry[1]})
    return {"name": name, "layers": layers}


def gen_instances(rng, net, count, radius, margin_min=0.02, max_tries=100):
    """Centers uniform in [0,1]^v0, labeled by the network's own argmax;
    weak-margin draws are rejected so the corpus stays decidable."""
    out = []
    for _ in range(count):
        for _ in range(max_tries):
            center = rng.uniform(0.0, 1.0, size=net.input_dim)
            logits = net.eval(center)
            order = np.argsort(logits)
            margin = logits[order[-1]] - logits[order[-2]]
            if margin >= margin_min:
                break
        else:
            raise RuntimeError("could not draw an instance with enough margin")
        out.append(
            {
                "center": round6(center).tolist(),
                "radius": radius,
                "label": int(order[-1]),
            }
        )
    return out


def check_saturation(net, rng, threshold=0.9):
    xs = rng.uniform(0.0, 1.0, size=(500, net.input_dim))
    h = xs
    fracs = []
    for lin, act in net.pairs():
        pre = h @ lin.W.T + lin.b
        fracs.append(float(np.mean(np.abs(pre) > 4.0)))
        h = 1.0 / (1.0 + np.exp(-pre))
    overall = float(np.mean(fracs))
    assert overall >= threshold, f"saturation {overall:.3f} below {threshold}"
    return fracs


def check_dead(net, radius):
    """Interval-propagate the whole input box and assert the dead neurons'
    pre-activation upper bounds stay below zero with margin."""
    lo = np.full(net.input_dim, 0.0 - radius)
    hi = np.full(net.input_dim, 1.0 + radius)
    dead_per_layer = []
    for lin, act in net.pairs():
        c, r = (lo + hi) / 2.0, (hi - lo) / 2.0
        mid = lin.W @ c + lin.b
        rad = np.abs(lin.W) @ r
        upper = mid + rad
        dead = upper < -0.5
        dead_per_layer.append(int(dead.sum()))
        lo, hi = np.maximum(mid - rad, 0.0), np.maximum(upper, 0.0)
    return dead_per_layer


def write_corpus(out_dir: Path, name, doc_layers, instances):
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "instances").mkdir(exist_ok=True)
    model_doc = to_model_doc(doc_layers, name)
    with open(out_dir / "model.json", "w") as fh:
        json.dump(model_doc, fh)
        fh.write("\n")
    paths = []
    for i, inst in enumerate(instances):
        rel = f"instances/{i:04d}.json"
        with open(out_dir / rel, "w") as fh:
            json.dump(inst, fh)
            fh.write("\n")
        paths.append(rel)
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump({"name": name, "model": "model.json", "instances": paths}, fh, indent=1)
        fh.write("\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out", default=str(Path(__file__).resolve().parent.parent / "tests" / "fixtures")
    )
    args = parser.parse_args()
    out = Path(args.out)

    # Saturated sigmoid corpus: 64 -> 200 x6 -> 10, scale 10, r = 0.001.
    # No output recentering here: the saturated network is near-constant, so
    # recentering would shrink class margins below verifiable levels.
    rng = np.random.default_rng(20240801)
    arch = [64] + [200] * 6 + [10]
    doc_layers = gen_sigmoid_net(rng, arch, scale=10.0)
    net = build_network(doc_layers, "sat_sigmoid_6x200")
    fracs = check_saturation(net, np.random.default_rng(1))
    instances = gen_instances(rng, net, 100, 0.001)
    labels = sorted({inst["label"] for inst in instances})
    write_corpus(out / "sat_sigmoid_6x200", "sat_sigmoid_6x200", doc_layers, instances)
    print(f"sat_sigmoid_6x200: saturation per layer {[f'{f:.3f}' for f in fracs]}")
    print(f"sat_sigmoid_6x200: 100 instances, labels used: {labels}")

    # Dead-ReLU corpus: 12 -> 20 x4 -> 5, half the neurons dead, r = 0.01.
    rng = np.random.default_rng(20240802)
    arch = [12] + [20] * 4 + [5]
    doc_layers = gen_dead_relu_net(rng, arch)
    recenter_output(doc_layers, rng, arch[0])
    net = build_network(doc_layers, "dead_relu_4x20")
    dead = check_dead(net, 0.01)
    assert dead == [10, 10, 10, 10], f"expected 10 dead per layer, got {dead}"
    instances = gen_instances(rng, net, 20, 0.01)
    write_corpus(out / "dead_relu_4x20", "dead_relu_4x20", doc_layers, instances)
    print(f"dead_relu_4x20: dead per layer {dead}, 20 instances")

    # Reload-validate both corpora through the public loader.
    for sub in ("sat_sigmoid_6x200", "dead_relu_4x20"):
        reloaded = networks.load(out / sub / "model.json")
        assert reloaded.neuron_counts()[0] > 0
    print(f"fixtures written to {out}")


if __name__ == "__main__":
    main()
