"""Probabilistic approximate counting.

Counters that represent a count of n in loglog(n) + O(1) bits by
advancing a small state k with state-dependent probability.  Three
families share one framework: the classic binary counter (``morris``),
the base-q generalization (``qary``), and the floating-point counter
(``fp``), whose state splits into an exponent and a d-bit significand
and which needs about two random bits per counted event.

The package provides the exact estimator/variance formulas
(:mod:`fpcount.chain`), deterministic bit streams with exact bit
accounting (:mod:`fpcount.randbits`), the counter state machines
(:mod:`fpcount.counters`), exact and floating-point computation of the
full state distribution after n updates (:mod:`fpcount.oracle`), a
vectorized Monte Carlo harness (:mod:`fpcount.ensemble`), dense
bit-packed counter tables with a stable snapshot format
(:mod:`fpcount.table`), and a CLI (``fpcount``).
"""

from .chain import (
    AccuracyBounds,
    CounterParams,
    CounterRangeError,
    Family,
    accuracy_limits,
    estimate,
    estimate_float,
    estimate_series,
    relative_spread,
    transition_prob,
    variance_fn,
    variance_series,
)
from .counters import (
    DEFAULT_CEILING,
    CounterState,
    decompose,
    increment,
    new_counter,
    storage_bits,
)
from .ensemble import (
    CheckpointStats,
    EnsembleReport,
    TrajectoryPoint,
    linear_checkpoints,
    log_checkpoints,
    merge_reports,
    run_ensemble,
    run_trajectory,
)
from .oracle import (
    MODE_EXACT,
    MODE_FLOAT,
    BitCost,
    MomentRecord,
    StepDistribution,
    accuracy,
    expected_bits,
    expected_estimate,
    expected_variance_fn,
    estimator_variance,
    step_distribution,
    sweep_moments,
)
from .randbits import BitSource, BitStream, ScriptedBitSource, child_seed
from .table import CounterTable, SlotEstimate

__version__ = "0.1.0"

__all__ = [
    "AccuracyBounds",
    "BitCost",
    "BitSource",
    "BitStream",
    "CheckpointStats",
    "CounterParams",
    "CounterRangeError",
    "CounterState",
    "CounterTable",
    "DEFAULT_CEILING",
    "EnsembleReport",
    "Family",
    "MODE_EXACT",
    "MODE_FLOAT",
    "MomentRecord",
    "ScriptedBitSource",
    "SlotEstimate",
    "StepDistribution",
    "TrajectoryPoint",
    "accuracy",
    "accuracy_limits",
    "child_seed",
    "decompose",
    "estimate",
    "estimate_float",
    "estimate_series",
    "estimator_variance",
    "expected_bits",
    "expected_estimate",
    "expected_variance_fn",
    "increment",
    "linear_checkpoints",
    "log_checkpoints",
    "merge_reports",
    "new_counter",
    "relative_spread",
    "run_ensemble",
    "run_trajectory",
    "step_distribution",
    "storage_bits",
    "sweep_moments",
    "transition_prob",
    "variance_fn",
    "variance_series",
]
