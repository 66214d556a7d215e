"""zonored: zonotope-based verification of feed-forward networks with
on-the-fly conservative neuron merging."""

from .activations import ActivationKind
from .enclosure import (
    NeuronApproximation,
    approximate_neuron,
    enclose_activation,
    enclose_linear,
)
from .intervals import EmptyIntersection, IntervalVector, activation_map, affine_map
from .networks import (
    ActivationLayer,
    LinearLayer,
    Network,
    ParseError,
    ShapeError,
    UnknownActivation,
    load,
    save,
)
from .reduction import MergeBucket, dynamic_buckets, merge, static_buckets
from .verifier import (
    DEFAULT_SCHEDULE,
    Classification,
    Halfspaces,
    InputSpec,
    VerificationReport,
    check,
    input_zonotope,
    parse_instance,
    run_once,
    verify,
)
from .zonotopes import Zonotope, halfspace_lower_bound, linear_map

__version__ = "0.1.0"

__all__ = [
    "ActivationKind",
    "ActivationLayer",
    "Classification",
    "DEFAULT_SCHEDULE",
    "EmptyIntersection",
    "Halfspaces",
    "InputSpec",
    "IntervalVector",
    "LinearLayer",
    "MergeBucket",
    "Network",
    "NeuronApproximation",
    "ParseError",
    "ShapeError",
    "UnknownActivation",
    "VerificationReport",
    "Zonotope",
    "activation_map",
    "affine_map",
    "approximate_neuron",
    "check",
    "dynamic_buckets",
    "enclose_activation",
    "enclose_linear",
    "halfspace_lower_bound",
    "input_zonotope",
    "linear_map",
    "load",
    "merge",
    "parse_instance",
    "run_once",
    "save",
    "static_buckets",
    "verify",
]
