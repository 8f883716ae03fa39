"""Interactive scores: model, verification, and live dispatch.

A score is a set of temporal objects (each with a duration set) tied
together by point-to-point constraints. Objects whose duration is
exactly {0} are interactive: a performer fires them live. This package
models such scores, translates them to timed event structures, decides
playability (shortest paths when durations are contiguous, finite
domain search otherwise), and executes them with locally propagated
time windows.
"""

from .analysis import (
    PropertyReport,
    Word,
    contains_word,
    filtered_property,
    min_duration,
    playability,
    score_traces,
    simultaneity_bounds,
)
from .csp import (
    FiniteDomainProblem,
    SubsetSumInstance,
    default_horizon,
    enumerate_traces,
    gen_subset_sum_score,
    solve,
)
from .durations import ANY_DELAY, BEFORE, ZERO, DurationSet
from .engine import (
    DispatchLog,
    TriggerPolicy,
    advance,
    enabled,
    fire,
    init_execution,
    next_wake,
    run_simulated,
    setup_execution,
)
from .errors import (
    ExplosionGuard,
    Inconsistent,
    IscoreError,
    NonContiguousDuration,
    NotEnabled,
    OutsideWindow,
    ParseError,
    ScoreValidationError,
    UnboundedDurations,
    Unplayable,
)
from .events import (
    EncodingMap,
    Event,
    EventDelay,
    TimedEventStructure,
    encode_score,
    normal_encoding,
    normalize,
    structure_constraints,
    validate_trace,
)
from .persistence import load_score, save_score
from .score import (
    Point,
    Score,
    TemporalObject,
    TemporalRelation,
    compile_hierarchy,
    score_constraints,
    validate_score,
)
from .stp import DistanceGraph, DistanceMatrix, apsp, make_dispatchable, to_stp

__version__ = "0.1.0"

__all__ = [
    "ANY_DELAY",
    "BEFORE",
    "ZERO",
    "DispatchLog",
    "DistanceGraph",
    "DistanceMatrix",
    "DurationSet",
    "EncodingMap",
    "Event",
    "EventDelay",
    "ExplosionGuard",
    "FiniteDomainProblem",
    "Inconsistent",
    "IscoreError",
    "NonContiguousDuration",
    "NotEnabled",
    "OutsideWindow",
    "ParseError",
    "Point",
    "PropertyReport",
    "Score",
    "ScoreValidationError",
    "SubsetSumInstance",
    "TemporalObject",
    "TemporalRelation",
    "TimedEventStructure",
    "TriggerPolicy",
    "UnboundedDurations",
    "Unplayable",
    "Word",
    "advance",
    "apsp",
    "compile_hierarchy",
    "contains_word",
    "default_horizon",
    "enabled",
    "encode_score",
    "enumerate_traces",
    "filtered_property",
    "fire",
    "gen_subset_sum_score",
    "init_execution",
    "load_score",
    "make_dispatchable",
    "min_duration",
    "next_wake",
    "normal_encoding",
    "normalize",
    "playability",
    "run_simulated",
    "save_score",
    "score_constraints",
    "score_traces",
    "setup_execution",
    "simultaneity_bounds",
    "solve",
    "structure_constraints",
    "to_stp",
    "validate_score",
    "validate_trace",
]
