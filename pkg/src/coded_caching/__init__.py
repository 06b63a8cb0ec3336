"""Coded caching with polynomial subpacketization via bounded subsets of Z_K."""

from .analytics import BaselineMetrics, SchemeMetrics, metrics, mn_baseline, mn_equivalence_threshold, sweep
from .bounded_subsets import (
    GapVector,
    SchemeParams,
    binomial,
    count_bounded_closed,
    count_bounded_upper,
    count_containing,
    decompose,
    enumerate_bounded,
    expand,
    fiber,
    forbidden_composition_count,
    is_bounded,
)
from .errors import IntegrityError, ParameterError, ResourceLimitError
from .scheme import (
    CacheContents,
    DeliveryMessage,
    FileLibrary,
    co_neighborhood,
    decode,
    deliver,
    neighborhood,
    place,
)
from .sim_harness import DemandSpec, TrialConfig, TrialReport, run_trial, verify_grid
