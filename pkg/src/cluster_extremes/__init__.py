"""Cluster-size distribution and extremal index estimation for stationary series.

The pipeline: partition the series into blocks, count exceedances of an
order-statistic threshold per block, take the empirical distribution of the
counts, and invert the compound-Poisson recursion to recover the cluster-size
law and the extremal index.  Smoothed variants average the estimators exactly
over an interval of threshold levels; simulators and a Monte Carlo harness
benchmark everything against processes with known cluster behavior.
"""

from .compound import CompoundPmf, CompoundProfile, compound_profile, empirical_compound
from .comparators import TwoScaleSpec, blocks_theta, hsing_pi, runs_theta, two_scale_threshold
from .errors import (
    ClusterExtremesError,
    DegenerateCompoundError,
    EmptyClusterMomentError,
    InvalidArgumentError,
    NoClustersError,
    ThresholdOutOfRangeError,
)
from .experiment import ExperimentConfig, RatioTable, emit_table, load_config, run_experiment
from .extremal import (
    ExtremalIndexReport,
    full_report,
    report_from_pmf,
    theta1,
    theta1_avar,
    theta2,
    theta3,
)
from .panjer import (
    ClusterSizePmf,
    CompoundPoissonSpec,
    SmoothedEstimates,
    panjer_forward,
    panjer_invert,
    panjer_invert_raw,
    smooth_cluster_pmf,
    smooth_theta1,
    smoothed_from_profile,
)
from .series import (
    BlockLayout,
    ExceedanceCounts,
    TimeSeries,
    count_exceedances,
    make_layout,
    order_statistic_threshold,
    read_series,
    write_series,
)
from .simulators import (
    PROCESS_KINDS,
    GroundTruth,
    ProcessSpec,
    derive_seed,
    exact_ground_truth,
    ground_truth,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "BlockLayout",
    "ClusterExtremesError",
    "ClusterSizePmf",
    "CompoundPmf",
    "CompoundPoissonSpec",
    "CompoundProfile",
    "DegenerateCompoundError",
    "EmptyClusterMomentError",
    "ExceedanceCounts",
    "ExperimentConfig",
    "ExtremalIndexReport",
    "GroundTruth",
    "InvalidArgumentError",
    "NoClustersError",
    "PROCESS_KINDS",
    "ProcessSpec",
    "RatioTable",
    "SmoothedEstimates",
    "ThresholdOutOfRangeError",
    "TimeSeries",
    "TwoScaleSpec",
    "blocks_theta",
    "compound_profile",
    "count_exceedances",
    "derive_seed",
    "emit_table",
    "empirical_compound",
    "exact_ground_truth",
    "full_report",
    "ground_truth",
    "hsing_pi",
    "load_config",
    "make_layout",
    "order_statistic_threshold",
    "panjer_forward",
    "panjer_invert",
    "panjer_invert_raw",
    "read_series",
    "report_from_pmf",
    "run_experiment",
    "runs_theta",
    "simulate",
    "smooth_cluster_pmf",
    "smooth_theta1",
    "smoothed_from_profile",
    "theta1",
    "theta1_avar",
    "theta2",
    "theta3",
    "two_scale_threshold",
    "write_series",
]
