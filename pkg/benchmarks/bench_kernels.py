#!/usr/bin/env python3
"""Benchmark the compiled per-neuron approximation kernel against the numpy
fallback, and the end-to-end effect on a verification run.

Usage: python benchmarks/bench_kernels.py [--repeats 20]
"""

from __future__ import annotations

import argparse
import json
import time
from pathlib import Path

import numpy as np

from zonored.kernels import _fallback

try:
    from zonored.kernels import _native
except ImportError:
    _native = None

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def time_call(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernel(repeats):
    rng = np.random.default_rng(0)
    print(f"{'kind':<8} {'width':>7} {'python':>12} {'native':>12} {'speedup':>8}  max|diff|")
    for code, kind in ((0, "relu"), (1, "sigmoid"), (2, "tanh")):
        for width in (10, 100, 1000, 10000):
            lo = rng.uniform(-8.0, 6.0, size=width)
            hi = lo + rng.uniform(0.0, 8.0, size=width)
            t_py = time_call(lambda: _fallback.approximate_layer(code, lo, hi, 20, 100),
                             repeats)
            row = f"{kind:<8} {width:>7} {t_py * 1e6:>10.1f}us"
            if _native is None:
                print(row + "       (compiled kernel not built)")
                continue
            t_c = time_call(lambda: _native.approximate_layer(code, lo, hi, 20, 100),
                            repeats)
            out_py = _fallback.approximate_layer(code, lo, hi, 20, 100)
            out_c = _native.approximate_layer(code, lo, hi, 20, 100)
            diff = max(float(np.abs(a - b).max()) for a, b in zip(out_py, out_c))
            print(row + f" {t_c * 1e6:>10.1f}us {t_py / t_c:>7.1f}x  {diff:.2e}")


def bench_verification(repeats):
    """Full verification pass on the committed saturated corpus, once per
    backend (backend is chosen at import, so this re-execs the interpreter)."""
    import os
    import subprocess
    import sys

    model = FIXTURES / "sat_sigmoid_6x200" / "model.json"
    inst = FIXTURES / "sat_sigmoid_6x200" / "instances" / "0000.json"
    if not model.exists():
        print("fixture corpus missing; run tools/make_fixtures.py first")
        return
    snippet = (
        "import json, time, numpy as np;"
        "from zonored import networks, verifier;"
        f"net = networks.load({str(model)!r});"
        f"doc = json.load(open({str(inst)!r}));"
        "spec, unsafe = verifier.parse_instance(doc);"
        "X = verifier.input_zonotope(spec);"
        "verifier.run_once(net, X, 0.01, 'dynamic');"
        "t0 = time.perf_counter();"
        f"[verifier.run_once(net, X, 0.01, 'dynamic') for _ in range({repeats})];"
        f"print((time.perf_counter() - t0) / {repeats})"
    )
    print()
    print("one reduced verification pass (6x200 sigmoid fixture):")
    for backend in ("python", "native"):
        env = dict(os.environ, ZONORED_KERNEL=backend)
        proc = subprocess.run(
            [sys.executable, "-c", snippet], capture_output=True, text=True, env=env
        )
        if proc.returncode != 0:
            print(f"  {backend:<8} unavailable ({proc.stderr.strip().splitlines()[-1]})")
            continue
        print(f"  {backend:<8} {float(proc.stdout) * 1e3:8.2f} ms")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()
    bench_kernel(args.repeats)
    bench_verification(max(3, args.repeats // 4))


if __name__ == "__main__":
    main()
