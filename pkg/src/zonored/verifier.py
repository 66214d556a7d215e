"""On-the-fly network reduction and verification.

One verification attempt propagates the input zonotope layer pair by layer
pair.  Before each hidden activation layer, cheap interval arithmetic looks
ahead to its output bounds, merge buckets are formed, and the working copy of
the network is reduced; the zonotope is then propagated through the reduced
layers only.  A schedule of decreasing bucket tolerances retries until the
specification is verified, with a final full-network run as fallback.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .activations import ActivationKind
from .enclosure import ERR_SAMPLES, FIT_SAMPLES, enclose_activation, enclose_linear
from .intervals import EmptyIntersection, IntervalVector, activation_map, affine_map
from .networks import Network, ParseError
from .reduction import dynamic_buckets, merge, static_buckets
from .zonotopes import Zonotope, halfspace_lower_bound

logger = logging.getLogger("zonored")

VERIFIED = "Verified"
UNKNOWN = "Unknown"

MODES = ("static", "dynamic", "none")

# Spans the tolerances that matter in practice; verify() appends a
# full-network fallback run after the schedule is exhausted.
DEFAULT_SCHEDULE = (0.1, 0.05, 0.01, 0.005, 0.001)


@dataclass(frozen=True)
class InputSpec:
    """L-infinity ball (center, radius) or explicit per-dimension box."""

    center: np.ndarray
    radius: float | None = None
    box: IntervalVector | None = None

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).reshape(-1))
        if (self.radius is None) == (self.box is None):
            raise ValueError("exactly one of radius or box is required")
        if self.radius is not None and not (np.isfinite(self.radius) and self.radius >= 0):
            raise ValueError("radius must be finite and >= 0")
        if self.box is not None and self.box.dim != self.center.size:
            raise ValueError("box dimension does not match center")


@dataclass(frozen=True)
class Halfspaces:
    """Unsafe set {y : A y <= b} (all rows simultaneously)."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A", np.atleast_2d(np.asarray(self.A, dtype=float)))
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float).reshape(-1))
        if self.A.shape[0] != self.b.size:
            raise ValueError("halfspace count mismatch between A and b")


@dataclass(frozen=True)
class Classification:
    """Unsafe set {y : exists j != label with y_j >= y_label}."""

    label: int


UnsafeSpec = Halfspaces | Classification


@dataclass
class LayerReduction:
    layer_index: int
    original: int
    remaining: int
    buckets_used: int
    merge_eligible: bool


@dataclass
class TraceEntry:
    """Look-ahead instrumentation: bounds computed for activation layer k and
    the working layers (W, bias, kind) up to and including that layer, as
    they stood when the bounds were computed."""

    layer_index: int
    bounds: IntervalVector
    layers: list[tuple[np.ndarray, object, ActivationKind]]


@dataclass
class RunResult:
    output: Zonotope
    layers: list[LayerReduction]
    timings: dict[str, float]
    trace: list[TraceEntry] = field(default_factory=list)


@dataclass
class VerificationReport:
    verdict: str
    delta_final: float
    mode: str
    layers: list[LayerReduction]
    rn_percent: float
    timings: dict[str, float]
    output_lower: np.ndarray
    output_upper: np.ndarray
    attempts: list[dict]
    schedule: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "delta_final": self.delta_final,
            "mode": self.mode,
            "rn_percent": self.rn_percent,
            "layers": [
                {
                    "layer_index": st.layer_index,
                    "original": st.original,
                    "remaining": st.remaining,
                    "buckets_used": st.buckets_used,
                    "merge_eligible": st.merge_eligible,
                }
                for st in self.layers
            ],
            "timings": dict(self.timings),
            "output_hull": {
                "lower": self.output_lower.tolist(),
                "upper": self.output_upper.tolist(),
            },
            "attempts": list(self.attempts),
            "schedule": list(self.schedule),
        }


def input_zonotope(spec: InputSpec) -> Zonotope:
    """L-infinity ball as a zonotope: diagonal generators, one per dimension.
    Zero-radius dimensions contribute prunable zero columns."""
    if spec.box is not None:
        return Zonotope(spec.box.center(), np.diag(spec.box.radius()))
    n = spec.center.size
    return Zonotope(spec.center, np.diag(np.full(n, float(spec.radius))))


def rn_percent(layers: list[LayerReduction]) -> float:
    """Remaining neurons in percent, over the merge-eligible activation
    layers (those followed by another linear layer)."""
    eligible = [st for st in layers if st.merge_eligible]
    if not eligible:
        return 100.0
    total = sum(st.original for st in eligible)
    remaining = sum(st.remaining for st in eligible)
    return 100.0 * remaining / total


def run_once(
    net: Network,
    X: Zonotope,
    delta: float,
    mode: str,
    fit_samples: int = FIT_SAMPLES,
    err_samples: int = ERR_SAMPLES,
    collect_trace: bool = False,
) -> RunResult:
    """One reduction + propagation pass over a working copy of the network.

    mode 'none' disables the look-ahead and reduction entirely, making this
    a plain layer-by-layer enclosure.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if delta < 0:
        raise ValueError("delta must be >= 0")
    if X.dim != net.input_dim:
        raise ValueError(f"input set dim {X.dim} != network input {net.input_dim}")

    pairs = net.pairs()
    tail = net.trailing_linear
    # Working copy: merge replaces entries, the originals are never mutated.
    Ws: list[np.ndarray] = [lin.W for lin, _ in pairs]
    bs: list = [lin.b for lin, _ in pairs]
    kinds = [act.kind for _, act in pairs]
    if tail is not None:
        Ws.append(tail.W)
        bs.append(tail.b)
    num_linear = len(Ws)

    stats: list[LayerReduction] = []
    trace: list[TraceEntry] = []
    t_look = 0.0
    t_enc = 0.0

    t0 = time.perf_counter()
    H = X.prune_zero_generators()
    prev_bounds: IntervalVector | None = None
    t_enc += time.perf_counter() - t0

    for p, (lin, act) in enumerate(pairs):
        k = 2 * (p + 1)
        original = act.width
        remaining = Ws[p].shape[0]
        buckets_used = 0
        eligible = p + 1 < num_linear

        if mode != "none" and eligible:
            t0 = time.perf_counter()
            bounds_in = H.interval_hull()
            if p > 0 and prev_bounds is not None:
                try:
                    bounds_in = bounds_in.intersect(
                        activation_map(kinds[p - 1], prev_bounds)
                    )
                except EmptyIntersection as exc:
                    logger.warning(
                        "look-ahead tightening before layer %d produced an empty "
                        "intersection (%s); keeping un-tightened bounds", k, exc
                    )
            pre = affine_map(Ws[p], bs[p], bounds_in)
            bounds_out = activation_map(kinds[p], pre)
            if collect_trace:
                snapshot = [
                    (Ws[i], bs[i], kinds[i]) for i in range(p + 1)
                ]
                trace.append(TraceEntry(k, bounds_out, snapshot))
            if mode == "static":
                buckets = static_buckets(kinds[p], bounds_out, delta)
            else:
                buckets = dynamic_buckets(bounds_out, delta)
            buckets = [replace(b, layer_index=k) for b in buckets]
            if buckets:
                Ws[p], bs[p], Ws[p + 1], bs[p + 1] = merge(
                    Ws[p], bs[p], Ws[p + 1], bs[p + 1], bounds_out, buckets
                )
                buckets_used = len(buckets)
                remaining = Ws[p].shape[0]
            t_look += time.perf_counter() - t0

        t0 = time.perf_counter()
        H = enclose_linear(Ws[p], bs[p], H).prune_zero_generators()
        H, prev_bounds = enclose_activation(
            kinds[p], H, fit_samples=fit_samples, err_samples=err_samples
        )
        H = H.prune_zero_generators()
        t_enc += time.perf_counter() - t0

        stats.append(LayerReduction(k, original, remaining, buckets_used, eligible))

    if tail is not None:
        t0 = time.perf_counter()
        H = enclose_linear(Ws[-1], bs[-1], H).prune_zero_generators()
        t_enc += time.perf_counter() - t0

    return RunResult(H, stats, {"look_ahead": t_look, "enclosure": t_enc}, trace)


def check(Y: Zonotope, unsafe: UnsafeSpec) -> str:
    """Sufficient disjointness certificate between the output set and the
    unsafe set.  Strict inequalities: boundary contact yields Unknown."""
    if isinstance(unsafe, Classification):
        label = unsafe.label
        if not 0 <= label < Y.dim:
            raise ValueError(f"label {label} out of range for {Y.dim} outputs")
        for j in range(Y.dim):
            if j == label:
                continue
            a = np.zeros(Y.dim)
            a[label] = 1.0
            a[j] = -1.0
            if halfspace_lower_bound(a, Y) <= 0.0:
                return UNKNOWN
        return VERIFIED
    if isinstance(unsafe, Halfspaces):
        if unsafe.A.shape[1] != Y.dim:
            raise ValueError(
                f"halfspace dim {unsafe.A.shape[1]} does not match {Y.dim} outputs"
            )
        for i in range(unsafe.A.shape[0]):
            if halfspace_lower_bound(unsafe.A[i], Y) > float(unsafe.b[i]):
                return VERIFIED
        return UNKNOWN
    raise TypeError(f"unsupported unsafe spec {type(unsafe)!r}")


def _attempt(net, X, delta, mode, unsafe, fit_samples, err_samples):
    result = run_once(net, X, delta, mode, fit_samples=fit_samples, err_samples=err_samples)
    t0 = time.perf_counter()
    verdict = check(result.output, unsafe)
    result.timings["check"] = time.perf_counter() - t0
    result.timings["total"] = sum(result.timings.values())
    return result, verdict


def verify(
    net: Network,
    input_spec: InputSpec,
    unsafe: UnsafeSpec,
    schedule=DEFAULT_SCHEDULE,
    mode: str = "dynamic",
    fit_samples: int = FIT_SAMPLES,
    err_samples: int = ERR_SAMPLES,
) -> VerificationReport:
    """Try the tolerance schedule from coarse to fine, then fall back to the
    full network.  Each attempt restarts from the original network."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    schedule = tuple(float(d) for d in schedule)
    if mode != "none":
        if not schedule:
            raise ValueError("schedule must be non-empty")
        if any(b >= a for a, b in zip(schedule, schedule[1:])):
            raise ValueError("schedule must be strictly decreasing")
        if any(d < 0 for d in schedule):
            raise ValueError("schedule entries must be >= 0")

    X = input_zonotope(input_spec)
    if input_spec.center.size != net.input_dim:
        raise ValueError(
            f"instance has {input_spec.center.size} inputs, network expects {net.input_dim}"
        )

    attempts: list[dict] = []
    if mode != "none":
        for delta in schedule:
            result, verdict = _attempt(net, X, delta, mode, unsafe, fit_samples, err_samples)
            attempts.append(
                {"delta": delta, "mode": mode, "verdict": verdict,
                 "time_s": result.timings["total"]}
            )
            if verdict == VERIFIED:
                return _report(verdict, delta, mode, result, attempts, schedule)

    result, verdict = _attempt(net, X, 0.0, "none", unsafe, fit_samples, err_samples)
    attempts.append(
        {"delta": 0.0, "mode": "none", "verdict": verdict, "time_s": result.timings["total"]}
    )
    return _report(verdict, 0.0, "none", result, attempts, schedule)


def _report(verdict, delta, mode, result: RunResult, attempts, schedule) -> VerificationReport:
    hull = result.output.interval_hull()
    return VerificationReport(
        verdict=verdict,
        delta_final=float(delta),
        mode=mode,
        layers=result.layers,
        rn_percent=rn_percent(result.layers),
        timings=dict(result.timings),
        output_lower=hull.lower,
        output_upper=hull.upper,
        attempts=attempts,
        schedule=schedule,
    )


def parse_instance(doc: dict, path: str = "<instance>") -> tuple[InputSpec, UnsafeSpec]:
    """Instance document: {"center": [...], "radius": r, "label": i} or
    {"center": [...], "box": [[lo, hi], ...], "unsafe": {"A": ..., "b": ...}}
    (radius/box and label/unsafe combine freely)."""
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: instance must be a JSON object")
    if "center" not in doc:
        raise ParseError(f"{path}: missing 'center'")
    center = np.asarray(doc["center"], dtype=float).reshape(-1)
    if not np.all(np.isfinite(center)):
        raise ParseError(f"{path}: non-finite center")

    has_radius = "radius" in doc
    has_box = "box" in doc
    if has_radius == has_box:
        raise ParseError(f"{path}: exactly one of 'radius' or 'box' is required")
    if has_radius:
        spec = InputSpec(center, radius=float(doc["radius"]))
    else:
        box = np.asarray(doc["box"], dtype=float)
        if box.ndim != 2 or box.shape != (center.size, 2):
            raise ParseError(f"{path}: 'box' must list [lo, hi] per input dimension")
        spec = InputSpec(center, box=IntervalVector(box[:, 0], box[:, 1]))

    has_label = "label" in doc
    has_unsafe = "unsafe" in doc
    if has_label == has_unsafe:
        raise ParseError(f"{path}: exactly one of 'label' or 'unsafe' is required")
    if has_label:
        unsafe: UnsafeSpec = Classification(int(doc["label"]))
    else:
        raw = doc["unsafe"]
        if not isinstance(raw, dict) or "A" not in raw or "b" not in raw:
            raise ParseError(f"{path}: 'unsafe' needs 'A' and 'b'")
        unsafe = Halfspaces(np.asarray(raw["A"], dtype=float), np.asarray(raw["b"], dtype=float))
    return spec, unsafe
