"""Comparator estimators using a separate (higher) threshold scale.

These classical blocks/runs estimators pick the threshold from a subsample
scale s = n / sample_ratio rather than from the block length, so they are
driven by two sequences.  They serve as baselines for the decompounding
pipeline in the benchmark study:

  hsing_pi:     among blocks with at least one exceedance, the relative
                frequency of blocks with exactly m exceedances.
  blocks_theta: occupied blocks / total exceedances (the reciprocal mean
                within-block cluster size).
  runs_theta:   fraction of exceedances followed by run_length sub-threshold
                observations; exceedances whose look-ahead window overruns
                the series end are excluded from numerator and denominator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, NoClustersError, ThresholdOutOfRangeError
from .panjer import ClusterSizePmf
from .series import TimeSeries, make_layout

__all__ = [
    "TwoScaleSpec",
    "two_scale_threshold",
    "hsing_pi",
    "blocks_theta",
    "runs_theta",
]

RUNS_WINDOW_POLICY = "full-window-only"


@dataclass(frozen=True)
class TwoScaleSpec:
    """Threshold scale and run length for the comparator estimators.

    ``sample_ratio`` is n / s for threshold subsample size s, so the
    threshold leaves about ``tau * sample_ratio`` observations above it.
    """

    sample_ratio: float
    num_blocks: int
    run_length: int

    def __post_init__(self):
        if self.sample_ratio <= 0:
            raise InvalidArgumentError(
                f"sample_ratio must be positive, got {self.sample_ratio}"
            )
        if self.num_blocks < 1:
            raise InvalidArgumentError(
                f"num_blocks must be >= 1, got {self.num_blocks}"
            )
        if self.run_length < 1:
            raise InvalidArgumentError(
                f"run_length must be >= 1, got {self.run_length}"
            )

    @classmethod
    def for_study(cls, n: int, num_blocks: int) -> "TwoScaleSpec":
        """Benchmark settings: sample_ratio = k/2, run_length = block_length/6."""
        block_length = n // num_blocks
        run_length = block_length // 6
        if run_length < 1:
            raise InvalidArgumentError(
                f"blocks of length {block_length} leave no room for a run window"
            )
        return cls(
            sample_ratio=num_blocks / 2,
            num_blocks=num_blocks,
            run_length=run_length,
        )


def two_scale_threshold(series: TimeSeries, tau: float, spec: TwoScaleSpec) -> float:
    """Order-statistic threshold over the whole series at the subsample scale.

    Leaves ``floor(tau * sample_ratio)`` order statistics above it; that count
    must land in [1, n-1].
    """
    level = int(math.floor(tau * spec.sample_ratio))
    n = series.n
    if not 1 <= level <= n - 1:
        raise ThresholdOutOfRangeError(
            f"floor(tau * sample_ratio) = {level} outside [1, {n - 1}]"
        )
    return float(np.sort(series.values)[n - 1 - level])


def _block_counts_above(series: TimeSeries, num_blocks: int, threshold: float) -> np.ndarray:
    layout = make_layout(series.n, num_blocks)
    used = series.values[: layout.used_length]
    return (used > threshold).reshape(num_blocks, layout.block_length).sum(axis=1)


def hsing_pi(
    series: TimeSeries,
    num_blocks: int,
    tau: float,
    two_scale: TwoScaleSpec,
    max_size: int,
) -> ClusterSizePmf:
    """Cluster-size law as the count distribution across occupied blocks.

    A genuine pmf: entries sum to 1 over the observed counts.  The support is
    extended to at least ``max_size`` with zeros so callers can read any size
    up to their cutoff.
    """
    threshold = two_scale_threshold(series, tau, two_scale)
    counts = _block_counts_above(series, num_blocks, threshold)
    occupied = counts[counts > 0]
    if occupied.size == 0:
        raise NoClustersError("no block contains an exceedance")
    freq = np.bincount(occupied, minlength=max_size + 1)
    m_top = max(max_size, int(occupied.max()))
    probs = tuple(freq[1 : m_top + 1] / occupied.size)
    return ClusterSizePmf(probs=probs)


def blocks_theta(
    series: TimeSeries, num_blocks: int, tau: float, two_scale: TwoScaleSpec
) -> float:
    """Occupied blocks over total exceedances; in (0, 1] whenever defined."""
    threshold = two_scale_threshold(series, tau, two_scale)
    counts = _block_counts_above(series, num_blocks, threshold)
    total = int(counts.sum())
    if total == 0:
        raise NoClustersError("no exceedances above the two-scale threshold")
    return int((counts > 0).sum()) / total


def runs_theta(series: TimeSeries, threshold: float, run_length: int) -> float:
    """Fraction of exceedances whose next run_length observations stay below.

    Only exceedances with a complete look-ahead window count at all, so the
    result is unaffected by how the series happens to end.
    """
    if run_length < 1:
        raise InvalidArgumentError(f"run_length must be >= 1, got {run_length}")
    x = series.values
    n = x.size
    eligible = np.flatnonzero(x[: n - run_length] > threshold)
    if eligible.size == 0:
        raise NoClustersError("no exceedance has a complete look-ahead window")
    quiet = sum(
        1 for i in eligible if np.max(x[i + 1 : i + 1 + run_length]) <= threshold
    )
    return quiet / eligible.size
