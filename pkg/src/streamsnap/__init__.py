"""Probabilistic snapshots of a data stream.

A size-one reservoir whose replacement schedule ``alpha_n`` controls where in
the stream's history the retained element sits, plus exact finite-n analysis,
limit laws, ensembles and a Monte-Carlo verification harness.
"""

from .ensemble import Ensemble, TargetSet, coverage_size, ensemble_update, quality
from .errors import (
    DomainError,
    PreconditionError,
    RecordError,
    ScheduleParseError,
    ScheduleRangeError,
    StreamSnapError,
    UnsupportedRegimeError,
)
from .exact import expected_k, expected_l, pmf, pmf_l, pmf_table, survival, survival_table
from .harness import EmpiricalDistribution, TestReport, check_monotonicity, ks_distance, regression_expected_l, simulate_terminal
from .ingest import StreamRecord, parse_schedule, read_records, run_stream
from .limits import Regime, RegimeDescriptor, classify, expected_k_asymptotic, expected_l_asymptotic, limiting_cdf, regime_of
from .sampler import Constant, PowerLaw, Schedule, SnapshotSampler, SnapshotState, Uniform, alpha_at, update

__version__ = "0.1.0"
