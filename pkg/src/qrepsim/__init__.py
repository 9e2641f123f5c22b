"""qrepsim: rate analytics and simulation for memory-limited repeater chains.

The package is organised in three tiers that check each other. Closed-form
analytics (:mod:`qrepsim.analytics`) and hardware-derived probabilities
(:mod:`qrepsim.dlcz`) give instant answers for single doubling steps; exact
Markov-chain oracles (:mod:`qrepsim.oracle`) solve small instances with no
approximation; the Monte Carlo simulator (:mod:`qrepsim.simulator`) handles
everything else and is validated against the first two tiers by
:mod:`qrepsim.verify` and the test suite. :mod:`qrepsim.cli` wraps all of
it behind ``qrepsim analytic|dlcz|simulate|verify``.
"""

from .analytics import (
    DivergenceError,
    DoublingStats,
    MultiplexedRate,
    WaitTerms,
    asymptotic_in_regime,
    doubling_stats,
    mean_Z_asymptotic,
    mean_Z_finite,
    mean_Z_finite_terms,
    mean_time_finite,
    mean_time_infinite,
    multiplexed_rate,
)
from .config import ConfigError, format_config_text, parse_config_text
from .dlcz import (
    Detector,
    DerivedProbabilities,
    PhysicalParams,
    derive,
    lifetime_to_units,
)
from .oracle import (
    CycleStats,
    OracleSizeError,
    cycle_stats_minimal_memory,
    exact_mean_time_doubling,
    exact_rate_multiplexed,
)
from .params import Architecture, ParameterError, RepeaterParams
from .rng import SplitMix64, derive_stream
from .simulator import (
    Method,
    RateEstimate,
    SweepRow,
    SweepSpec,
    TrialResult,
    estimate_rate,
    run_trial,
    sweep,
)
from .verify import CheckResult, SuiteReport, run_all, run_suite

__version__ = "0.1.0"

__all__ = [
    "Architecture",
    "CheckResult",
    "ConfigError",
    "CycleStats",
    "DerivedProbabilities",
    "Detector",
    "DivergenceError",
    "DoublingStats",
    "Method",
    "MultiplexedRate",
    "OracleSizeError",
    "ParameterError",
    "PhysicalParams",
    "RateEstimate",
    "RepeaterParams",
    "SplitMix64",
    "SuiteReport",
    "SweepRow",
    "SweepSpec",
    "TrialResult",
    "WaitTerms",
    "__version__",
    "asymptotic_in_regime",
    "cycle_stats_minimal_memory",
    "derive",
    "derive_stream",
    "doubling_stats",
    "estimate_rate",
    "exact_mean_time_doubling",
    "exact_rate_multiplexed",
    "format_config_text",
    "lifetime_to_units",
    "mean_Z_asymptotic",
    "mean_Z_finite",
    "mean_Z_finite_terms",
    "mean_time_finite",
    "mean_time_infinite",
    "multiplexed_rate",
    "parse_config_text",
    "run_all",
    "run_suite",
    "run_trial",
    "sweep",
]
