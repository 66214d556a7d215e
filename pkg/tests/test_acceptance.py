"""Acceptance suite.

Each test implements one acceptance criterion end to end at its stated
tolerance and prints one [PASS] line on success (run with ``pytest -v -s``
to see them); a failing criterion fails its test.  All corpora are
pre-committed fixtures under tests/fixtures/ regenerable with
tools/make_fixtures.py.
"""

import json
import os
import time
from pathlib import Path

import numpy as np
import pytest

import oracles
from conftest import FIXTURES, random_network, random_zonotope
from zonored import (
    ActivationKind,
    Classification,
    Halfspaces,
    InputSpec,
    IntervalVector,
    MergeBucket,
    Zonotope,
    check,
    input_zonotope,
    linear_map,
    halfspace_lower_bound,
    merge,
    run_once,
    verify,
)
from zonored.enclosure import enclose_activation, enclose_linear
from zonored.networks import load
from zonored.verifier import VERIFIED, rn_percent

SAT_DIR = FIXTURES / "sat_sigmoid_6x200"
DEAD_DIR = FIXTURES / "dead_relu_4x20"


def read_corpus(corpus_dir):
    net = load(corpus_dir / "model.json")
    with open(corpus_dir / "manifest.json") as fh:
        manifest = json.load(fh)
    instances = []
    for rel in manifest["instances"]:
        with open(corpus_dir / rel) as fh:
            instances.append(json.load(fh))
    return net, instances


def in_unsafe(unsafe, y):
    """Independent unsafe-set membership for sampled outputs (rows of y)."""
    if isinstance(unsafe, Classification):
        others = np.delete(y, unsafe.label, axis=1)
        if others.shape[1] == 0:  # single class: the unsafe set is empty
            return np.zeros(y.shape[0], dtype=bool)
        return others.max(axis=1) >= y[:, unsafe.label]
    return np.all(y @ unsafe.A.T <= unsafe.b, axis=1)


def test_c1_zonotope_kernel_oracle_suite():
    """interval_hull / linear_map / add_interval / halfspace_lower_bound vs
    brute-force sign-vertex enumeration: 1000 seeded cases, tol 1e-9, <10 s."""
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        q = int(rng.integers(0, 11))
        Z = random_zonotope(rng, n, q, scale=2.0)

        lo, hi = oracles.hull_by_enumeration(Z.center, Z.generators)
        hull = Z.interval_hull()
        np.testing.assert_allclose(hull.lower, lo, atol=1e-9)
        np.testing.assert_allclose(hull.upper, hi, atol=1e-9)

        m = int(rng.integers(1, 5))
        W = rng.normal(size=(m, n))
        b = rng.normal(size=m)
        mapped = linear_map(W, b, Z)
        vlo, vhi = oracles.hull_by_enumeration(mapped.center, mapped.generators)
        mh = mapped.interval_hull()
        np.testing.assert_allclose(mh.lower, vlo, atol=1e-9)
        np.testing.assert_allclose(mh.upper, vhi, atol=1e-9)

        blo = rng.normal(size=n)
        box = IntervalVector(blo, blo + rng.uniform(0.0, 1.0, size=n))
        summed = Z.add_interval(box)
        slo, shi = oracles.hull_by_enumeration(summed.center, summed.generators)
        sh = summed.interval_hull()
        np.testing.assert_allclose(sh.lower, slo, atol=1e-9)
        np.testing.assert_allclose(sh.upper, shi, atol=1e-9)

        a = rng.normal(size=n)
        want = oracles.support_lower_by_enumeration(a, Z.center, Z.generators)
        assert abs(halfspace_lower_bound(a, Z) - want) <= 1e-9
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0, f"kernel oracle suite took {elapsed:.1f} s"
    print(f"\n[PASS] C1 zonotope kernel oracle suite: 1000 cases in {elapsed:.1f} s")


def test_c2_enclosure_soundness_suite():
    """200 random activation layers: sampled images inside the output hull
    (slack 1e-9); ReLU error intervals exact against dense sampling.  <60 s."""
    rng = np.random.default_rng(202)
    t0 = time.perf_counter()
    kinds = list(ActivationKind)
    for i in range(200):
        kind = kinds[i % 3]
        n = int(rng.integers(1, 9))
        q = int(rng.integers(0, 9))
        Z = random_zonotope(rng, n, q, scale=1.5)
        out, bounds = enclose_activation(kind, Z)
        hull = out.interval_hull()
        pts = oracles.sample_zonotope(Z.center, Z.generators, 10_000, rng,
                                      include_vertices=True)
        ys = oracles.ACTS[kind.value](pts)
        assert np.all(ys >= hull.lower - 1e-9), f"layer {i} ({kind}) lower violated"
        assert np.all(ys <= hull.upper + 1e-9), f"layer {i} ({kind}) upper violated"

        if kind is ActivationKind.RELU:
            from zonored import kernels

            lam, mu, dlo, dhi = kernels.approximate_layer(
                kind, bounds.lower, bounds.upper
            )
            for j in range(n):
                lo_j, hi_j = bounds.lower[j], bounds.upper[j]
                xs = np.linspace(lo_j, hi_j, 100_000)
                d = oracles.relu(xs) - (lam[j] * xs + mu[j])
                # Exact containment with zero slack...
                assert d.min() >= dlo[j] and d.max() <= dhi[j]
                # ...and tight: extremes attained up to the grid resolution.
                h = (hi_j - lo_j) / (100_000 - 1)
                assert d.max() >= dhi[j] - 2 * h
                assert d.min() <= dlo[j] + 2 * h
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0, f"enclosure suite took {elapsed:.1f} s"
    print(f"\n[PASS] C2 enclosure soundness suite: 200 layers in {elapsed:.1f} s")


def test_c3_merge_containment_chain():
    """200 random tiny networks with forced buckets: original layer-(k+1)
    outputs of sampled inputs lie inside the reduced interval propagation.
    Zero violations."""
    rng = np.random.default_rng(303)
    violations = 0
    for _ in range(200):
        n_in = int(rng.integers(1, 6))
        width = int(rng.integers(2, 9))
        n_out = int(rng.integers(1, 6))
        kind = ActivationKind(rng.choice(["relu", "sigmoid", "tanh"]))
        W1 = rng.normal(size=(width, n_in))
        b1 = rng.normal(size=width)
        W2 = rng.normal(size=(n_out, width))
        b2 = rng.normal(size=n_out)
        in_lo = rng.normal(size=n_in)
        in_hi = in_lo + rng.uniform(0.0, 2.0, size=n_in)
        lo_k, hi_k = oracles.interval_forward([(W1, b1), kind.value], in_lo, in_hi)
        bounds = IntervalVector(lo_k, hi_k)

        # Force one or two valid buckets from random member groups.
        perm = rng.permutation(width)
        buckets = []
        cursor = 0
        for _ in range(int(rng.integers(1, 3))):
            size = int(rng.integers(2, 4))
            if cursor + size > width:
                break
            members = tuple(sorted(int(w) for w in perm[cursor : cursor + size]))
            cursor += size
            msel = list(members)
            center = float((lo_k[msel].min() + hi_k[msel].max()) / 2.0)
            delta = float(
                max((center - lo_k[msel]).max(), (hi_k[msel] - center).max()) + 1e-12
            )
            buckets.append(MergeBucket(center, delta, members))
        if not buckets:
            continue

        W1h, b1h, W2h, b2h = merge(W1, b1, W2, b2, bounds, buckets)
        xs = oracles.sample_box(in_lo, in_hi, 1000, rng)
        h_orig = oracles.forward([(W1, b1), kind.value, (W2, b2)], xs)
        h_kept = oracles.forward([(W1h, b1h), kind.value], xs)
        lo_red = h_kept @ W2h.T + b2h.lower
        hi_red = h_kept @ W2h.T + b2h.upper
        violations += int(
            np.any((h_orig < lo_red - 1e-9) | (h_orig > hi_red + 1e-9))
        )
    assert violations == 0
    print("\n[PASS] C3 merge containment chain: 200 networks, zero violations")


def _random_instance(rng, net):
    center = rng.uniform(-1.0, 1.0, size=net.input_dim)
    radius = float(rng.choice([0.01, 0.05, 0.1, 0.2]))
    if rng.uniform() < 0.7:
        label = int(np.argmax(net.eval(center)))
        unsafe = Classification(label)
    else:
        rows = int(rng.integers(1, 3))
        A = rng.normal(size=(rows, net.output_dim))
        y0 = net.eval(center)
        # Halfspaces offset away from the nominal output so that a fair share
        # of instances is actually verifiable.
        b = A @ y0 - rng.uniform(0.5, 2.0, size=rows)
        unsafe = Halfspaces(A, b)
    return InputSpec(center, radius=radius), unsafe


def test_c4_end_to_end_soundness_and_c5_mode_none():
    """C4: 100 seeded random networks x instances x full schedule; every
    Verified verdict survives a 10^4-sample counterexample search plus box
    vertices for small inputs.  Zero violations.
    C5: on the same networks, mode none output is bit-identical to a plain
    reference propagation."""
    verified_count = 0
    for i in range(100):
        rng = np.random.default_rng(40_000 + i)
        pairs_n = int(rng.integers(1, 5))  # depth <= 8 layers
        net = random_network(
            rng, pairs_n, 20, trailing=bool(rng.integers(0, 2))
        )
        spec, unsafe = _random_instance(rng, net)
        mode = "static" if i % 5 == 0 else "dynamic"
        report = verify(net, spec, unsafe, mode=mode)

        # C5 on this network: bit-identical plain propagation.
        X = input_zonotope(spec)
        got = run_once(net, X, 0.0, "none").output
        H = X.prune_zero_generators()
        for lin, act in net.pairs():
            H = enclose_linear(lin.W, lin.b, H).prune_zero_generators()
            H, _ = enclose_activation(act.kind, H)
            H = H.prune_zero_generators()
        tail = net.trailing_linear
        if tail is not None:
            H = enclose_linear(tail.W, tail.b, H).prune_zero_generators()
        np.testing.assert_array_equal(got.center, H.center)
        np.testing.assert_array_equal(got.generators, H.generators)

        if report.verdict != VERIFIED:
            continue
        verified_count += 1
        lo = spec.center - spec.radius
        hi = spec.center + spec.radius
        xs = oracles.sample_box(lo, hi, 10_000, rng)
        # Axis-extreme points, and all box vertices for small input dims.
        extremes = np.vstack([np.diag(hi - spec.center), np.diag(lo - spec.center)])
        xs = np.vstack([xs, spec.center + extremes])
        if net.input_dim <= 12:
            xs = np.vstack([xs, oracles.box_vertices(lo, hi)])
        ys = net.eval(xs)
        hits = in_unsafe(unsafe, ys)
        assert not hits.any(), (
            f"network {i}: Verified but {int(hits.sum())} sampled counterexamples"
        )
    assert verified_count >= 20, f"only {verified_count} Verified instances; corpus too hard"
    print(
        f"\n[PASS] C4 end-to-end soundness: 100 networks, {verified_count} verified, "
        "zero counterexamples"
    )
    print("[PASS] C5 mode-none equivalence: bit-identical on all 100 networks")


def test_c5_mode_none_on_fixture_corpora():
    """Mode-none equivalence on the committed fixture networks too."""
    for corpus_dir in (SAT_DIR, DEAD_DIR):
        net, instances = read_corpus(corpus_dir)
        inst = instances[0]
        X = input_zonotope(InputSpec(np.array(inst["center"]), radius=inst["radius"]))
        got = run_once(net, X, 0.0, "none").output
        H = X.prune_zero_generators()
        for lin, act in net.pairs():
            H = enclose_linear(lin.W, lin.b, H).prune_zero_generators()
            H, _ = enclose_activation(act.kind, H)
            H = H.prune_zero_generators()
        tail = net.trailing_linear
        if tail is not None:
            H = enclose_linear(tail.W, tail.b, H).prune_zero_generators()
        np.testing.assert_array_equal(got.center, H.center)
        np.testing.assert_array_equal(got.generators, H.generators)
    print("\n[PASS] C5 mode-none equivalence: fixture corpora bit-identical")


def test_c6_saturated_sigmoid_reduction_analogue():
    """Fixture 6x200 sigmoid corpus at delta = 0.01 dynamic: mean RN <= 50%,
    verdicts identical to the full-network run on every instance, and mean
    wall-clock <= 0.6x the full-network run."""
    net, instances = read_corpus(SAT_DIR)
    assert len(instances) == 100

    # Warm up BLAS/kernels before timing.
    warm = instances[0]
    Xw = input_zonotope(InputSpec(np.array(warm["center"]), radius=warm["radius"]))
    run_once(net, Xw, 0.01, "dynamic")
    run_once(net, Xw, 0.0, "none")

    rn_values = []
    t_reduced = []
    t_full = []
    mismatches = []
    for idx, inst in enumerate(instances):
        spec = InputSpec(np.array(inst["center"]), radius=inst["radius"])
        unsafe = Classification(int(inst["label"]))
        X = input_zonotope(spec)

        t0 = time.perf_counter()
        reduced = run_once(net, X, 0.01, "dynamic")
        verdict_reduced = check(reduced.output, unsafe)
        t_reduced.append(time.perf_counter() - t0)

        t0 = time.perf_counter()
        full = run_once(net, X, 0.0, "none")
        verdict_full = check(full.output, unsafe)
        t_full.append(time.perf_counter() - t0)

        rn_values.append(rn_percent(reduced.layers))
        if verdict_reduced != verdict_full:
            mismatches.append((idx, verdict_reduced, verdict_full))

    mean_rn = float(np.mean(rn_values))
    ratio = float(np.mean(t_reduced) / np.mean(t_full))
    assert mean_rn <= 50.0, f"mean RN {mean_rn:.1f}% exceeds 50%"
    assert not mismatches, f"verdict mismatches: {mismatches[:5]}"
    assert ratio <= 0.6, f"reduced/full wall-clock ratio {ratio:.2f} exceeds 0.6"
    print(
        f"\n[PASS] C6 saturated-sigmoid analogue: mean RN {mean_rn:.1f}%, "
        f"verdicts identical on 100/100, time ratio {ratio:.2f}"
    )


def test_c7_dead_relu_analogue():
    """Fixture dead-ReLU corpus with static buckets at delta = 0: exactly the
    dead half of each hidden layer is removed (RN = 50% +- 2) and verdicts
    match the full-network run."""
    net, instances = read_corpus(DEAD_DIR)
    for inst in instances:
        spec = InputSpec(np.array(inst["center"]), radius=inst["radius"])
        unsafe = Classification(int(inst["label"]))
        X = input_zonotope(spec)
        reduced = run_once(net, X, 0.0, "static")
        full = run_once(net, X, 0.0, "none")
        rn = rn_percent(reduced.layers)
        assert abs(rn - 50.0) <= 2.0, f"RN {rn:.2f}% not within 50 +- 2"
        for st in reduced.layers:
            assert st.remaining == st.original // 2
        assert check(reduced.output, unsafe) == check(full.output, unsafe)
    print("\n[PASS] C7 dead-ReLU analogue: RN 50% exactly, verdicts unchanged on "
          f"{len(instances)} instances")


@pytest.mark.skipif(
    "ZONORED_ERAN_MODEL" not in os.environ or "ZONORED_MNIST_CSV" not in os.environ,
    reason="optional, non-gating: set ZONORED_ERAN_MODEL and ZONORED_MNIST_CSV "
    "to run the external benchmark spot check",
)
def test_c8_optional_eran_table_spot_check():
    """Non-gating spot check on the externally supplied 6x200 ReLU benchmark
    network: at r = 0.001, delta = 0.0001 expect VR = 100% and RN within
    +-10 points of 38.59%."""
    model_path = Path(os.environ["ZONORED_ERAN_MODEL"])
    if model_path.suffix != ".json":
        import sys

        sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tools"))
        from convert_eran import convert

        model_path = convert(model_path, Path("/tmp/eran_model.json"))
    net = load(model_path)

    rows = np.loadtxt(os.environ["ZONORED_MNIST_CSV"], delimiter=",", max_rows=500)
    verified = 0
    total = 0
    rn_values = []
    for row in rows:
        label = int(row[0])
        x = row[1:] / 255.0
        if int(np.argmax(net.eval(x))) != label:
            continue  # only correctly classified images
        total += 1
        report = verify(
            net, InputSpec(x, radius=0.001), Classification(label), schedule=(0.0001,)
        )
        if report.verdict == VERIFIED:
            verified += 1
            rn_values.append(report.rn_percent)
        if total == 100:
            break
    assert total == 100, "not enough correctly classified images"
    vr = 100.0 * verified / total
    mean_rn = float(np.mean(rn_values))
    assert vr == 100.0, f"VR {vr}%"
    assert abs(mean_rn - 38.59) <= 10.0, f"RN {mean_rn:.2f}% not within 38.59 +- 10"
    print(f"\n[PASS] C8 benchmark spot check: VR {vr}%, RN {mean_rn:.2f}%")
