"""Command-line surface: single-instance verification and batch benchmarking
with CSV reports.

CSV schemas (12 significant digits, '.' decimal point, header row):
  summary.csv: instance_id, verdict, delta_final, time_ms, rn_percent
  layers.csv:  instance_id, layer_index, original_neurons, remaining_neurons, buckets_used
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import kernels, networks, verifier
from .networks import ParseError, ShapeError, UnknownActivation

JOBS_ENV = "ZONORED_JOBS"
DEFAULT_SEED = 1


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _parse_schedule(text: str | None):
    if text is None:
        return verifier.DEFAULT_SCHEDULE
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise ParseError(f"bad --delta-schedule {text!r}: expected comma-separated reals") from None


def _load_instance(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read instance file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    return verifier.parse_instance(doc, path=str(path))


def _sample_inputs(spec, count, rng):
    if spec.box is not None:
        lo, hi = spec.box.lower, spec.box.upper
    else:
        lo = spec.center - spec.radius
        hi = spec.center + spec.radius
    return rng.uniform(lo, hi, size=(count, lo.size))


def _in_unsafe(unsafe, y: np.ndarray) -> np.ndarray:
    """Row-wise membership of outputs in the unsafe set."""
    if isinstance(unsafe, verifier.Classification):
        label = unsafe.label
        others = np.delete(y, label, axis=1)
        if others.shape[1] == 0:  # single class: the unsafe set is empty
            return np.zeros(y.shape[0], dtype=bool)
        return others.max(axis=1) >= y[:, label]
    return np.all(y @ unsafe.A.T <= unsafe.b, axis=1)


def _self_check(net, spec, unsafe, report, count, seed) -> list[str]:
    """Sampling-based soundness self-check; returns violation messages."""
    rng = np.random.default_rng(seed)
    xs = _sample_inputs(spec, count, rng)
    ys = net.eval(xs)
    problems = []
    lo, hi = report.output_lower, report.output_upper
    outside = np.any(ys < lo - 1e-7, axis=1) | np.any(ys > hi + 1e-7, axis=1)
    if outside.any():
        problems.append(
            f"{int(outside.sum())}/{count} sampled outputs escape the output hull"
        )
    if report.verdict == verifier.VERIFIED:
        bad = _in_unsafe(unsafe, ys)
        if bad.any():
            problems.append(
                f"{int(bad.sum())}/{count} sampled outputs hit the unsafe set despite Verified"
            )
    return problems


def _print_report(report, model_path, instance_path):
    print(f"model:    {model_path}")
    print(f"instance: {instance_path}")
    print(f"verdict:  {report.verdict}")
    print(f"mode:     {report.mode}   delta: {_fmt(report.delta_final)}")
    print(f"remaining neurons: {report.rn_percent:.2f}%")
    for st in report.layers:
        tag = "" if st.merge_eligible else "  (output layer, not merged)"
        print(
            f"  layer {st.layer_index:3d}: {st.remaining:5d} / {st.original:5d} neurons"
            f"   buckets used: {st.buckets_used}{tag}"
        )
    t = report.timings
    print(
        f"time: total {t.get('total', 0.0) * 1e3:.2f} ms  "
        f"(look-ahead {t.get('look_ahead', 0.0) * 1e3:.2f}, "
        f"enclosure {t.get('enclosure', 0.0) * 1e3:.2f}, "
        f"check {t.get('check', 0.0) * 1e3:.2f})"
    )


def cmd_verify(args) -> int:
    net = networks.load(args.model)
    spec, unsafe = _load_instance(args.instance)
    schedule = _parse_schedule(args.delta_schedule)
    report = verifier.verify(net, spec, unsafe, schedule=schedule, mode=args.buckets)
    _print_report(report, args.model, args.instance)

    if args.out:
        doc = report.to_dict()
        doc["model"] = str(args.model)
        doc["instance"] = str(args.instance)
        doc["kernel_backend"] = kernels.BACKEND
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")

    if args.samples_check:
        problems = _self_check(net, spec, unsafe, report, args.samples_check, args.seed)
        if problems:
            for msg in problems:
                print(f"SOUNDNESS self-check FAILED: {msg}", file=sys.stderr)
            return 1
        print(f"self-check: {args.samples_check} samples OK")

    return 0 if report.verdict == verifier.VERIFIED else 2


def _instance_paths(instances_arg) -> list[Path]:
    path = Path(instances_arg)
    if path.is_file():
        with open(path, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
        if not isinstance(manifest, dict) or "instances" not in manifest:
            raise ParseError(f"{path}: manifest must contain an 'instances' list")
        return [path.parent / p for p in manifest["instances"]]
    if path.is_dir():
        skip = {"model.json", "manifest.json"}
        return sorted(p for p in path.glob("*.json") if p.name not in skip)
    raise ParseError(f"{instances_arg}: not a file or directory")


def cmd_batch(args) -> int:
    net = networks.load(args.model)
    schedule = _parse_schedule(args.delta_schedule)
    paths = _instance_paths(args.instances)
    if not paths:
        print("error: no instances to verify", file=sys.stderr)
        return 1

    jobs = args.jobs or int(os.environ.get(JOBS_ENV, "1"))

    def one(path):
        t0 = time.perf_counter()
        try:
            spec, unsafe = _load_instance(path)
            report = verifier.verify(net, spec, unsafe, schedule=schedule, mode=args.buckets)
            return report, time.perf_counter() - t0, None
        except (ParseError, ShapeError, UnknownActivation, ValueError) as exc:
            return None, time.perf_counter() - t0, str(exc)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, paths))
    else:
        results = [one(p) for p in paths]

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary_rows = []
    layer_rows = []
    for path, (report, elapsed, err) in zip(paths, results):
        instance_id = path.stem
        if err is not None:
            print(f"warning: {path}: {err}", file=sys.stderr)
            summary_rows.append([instance_id, "Error", "nan", _fmt(elapsed * 1e3), "nan"])
            continue
        summary_rows.append(
            [
                instance_id,
                report.verdict,
                _fmt(report.delta_final),
                _fmt(elapsed * 1e3),
                _fmt(report.rn_percent),
            ]
        )
        for st in report.layers:
            layer_rows.append(
                [instance_id, st.layer_index, st.original, st.remaining, st.buckets_used]
            )

    with open(out_dir / "summary.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["instance_id", "verdict", "delta_final", "time_ms", "rn_percent"])
        w.writerows(summary_rows)
    with open(out_dir / "layers.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["instance_id", "layer_index", "original_neurons", "remaining_neurons", "buckets_used"]
        )
        w.writerows(layer_rows)

    reports = [r for r, _, e in results if e is None]
    times = [t for _, t, e in results if e is None]
    verified = sum(r.verdict == verifier.VERIFIED for r in reports)
    total = len(paths)
    vr = 100.0 * verified / total
    print(f"instances: {total}   verified: {verified}   VR: {vr:.2f}%")
    if reports:
        mean_rn = float(np.mean([r.rn_percent for r in reports]))
        print(f"mean RN: {mean_rn:.2f}%")
        first = reports[0]
        if all(len(r.layers) == len(first.layers) for r in reports):
            per_layer = [
                float(np.mean([r.layers[i].remaining for r in reports]))
                for i in range(len(first.layers))
            ]
            print(
                "mean remaining per layer: "
                + ", ".join(f"{st.layer_index}:{m:.1f}" for st, m in zip(first.layers, per_layer))
            )
        print(
            f"wall-clock: total {sum(times):.3f} s   mean {np.mean(times) * 1e3:.2f} ms"
        )
    print(f"wrote {out_dir / 'summary.csv'} and {out_dir / 'layers.csv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zonored",
        description="Zonotope verification of feed-forward networks with "
        "on-the-fly conservative neuron merging",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--model", required=True, help="model JSON file")
        p.add_argument(
            "--delta-schedule",
            help="comma-separated decreasing bucket tolerances "
            f"(default {','.join(str(d) for d in verifier.DEFAULT_SCHEDULE)})",
        )
        p.add_argument(
            "--buckets",
            choices=sorted(verifier.MODES),
            default="dynamic",
            help="bucket creation mode (default dynamic)",
        )
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for self-checks")

    pv = sub.add_parser("verify", help="verify one instance")
    common(pv)
    pv.add_argument("--instance", required=True, help="instance JSON file")
    pv.add_argument("--out", help="write a machine-readable JSON report here")
    pv.add_argument(
        "--samples-check",
        type=int,
        default=0,
        metavar="N",
        help="run an N-sample soundness self-check after verification",
    )
    pv.set_defaults(func=cmd_verify)

    pb = sub.add_parser("batch", help="verify a directory or manifest of instances")
    common(pb)
    pb.add_argument("--instances", required=True, help="instance directory or manifest JSON")
    pb.add_argument("--out-dir", default=".", help="directory for summary.csv / layers.csv")
    pb.add_argument(
        "--jobs",
        type=int,
        default=0,
        help=f"parallel verification tasks (default ${JOBS_ENV} or 1)",
    )
    pb.set_defaults(func=cmd_batch)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ShapeError, UnknownActivation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
