"""Observed series, blocks partition and per-block exceedance counts.

The estimation pipeline starts here: a series of length n is split into
``num_blocks`` blocks of equal length (a short remainder at the end is
discarded), a data-driven threshold is taken as an order statistic of the
retained observations, and each block is reduced to the number of its
observations strictly above that threshold.

All functions are pure; the value types are frozen dataclasses and safe to
share across threads or processes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import InvalidArgumentError, ThresholdOutOfRangeError

__all__ = [
    "TimeSeries",
    "BlockLayout",
    "ExceedanceCounts",
    "make_layout",
    "order_statistic_threshold",
    "count_exceedances",
    "read_series",
    "write_series",
]


@dataclass(frozen=True)
class TimeSeries:
    """Ordered real-valued observations plus free-form provenance metadata.

    Values must be finite; NaN or infinities are rejected at construction
    because order statistics are undefined for them.
    """

    values: np.ndarray
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise InvalidArgumentError("series must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(arr)):
            raise InvalidArgumentError("series contains NaN or infinite values")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class BlockLayout:
    """Partition of the first ``block_count * block_length`` observations.

    ``remainder_length`` observations at the end of the series belong to no
    block and never influence estimation.  With the block length derived as
    floor(n / block_count) the remainder is below ``block_count`` but can
    exceed ``block_length``.
    """

    block_length: int
    block_count: int
    remainder_length: int

    def __post_init__(self):
        if self.block_length < 1 or self.block_count < 1:
            raise InvalidArgumentError("block length and count must be positive")
        if self.remainder_length < 0:
            raise InvalidArgumentError("remainder cannot be negative")

    @property
    def used_length(self) -> int:
        """Number of observations that participate in estimation."""
        return self.block_length * self.block_count


@dataclass(frozen=True)
class ExceedanceCounts:
    """Per-block counts of observations strictly above the fitted threshold."""

    counts: np.ndarray
    threshold_used: float
    tau: float

    def __post_init__(self):
        arr = np.asarray(self.counts, dtype=np.int64)
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "counts", arr)


def make_layout(n: int, num_blocks: int) -> BlockLayout:
    """Derive the block length from the series length and the block count.

    The block length is ``floor(n / num_blocks)``; whatever does not fit into
    ``num_blocks`` full blocks is the discarded remainder.
    """
    if num_blocks < 1:
        raise InvalidArgumentError(f"num_blocks must be >= 1, got {num_blocks}")
    if num_blocks > n:
        raise InvalidArgumentError(
            f"cannot form {num_blocks} blocks from {n} observations"
        )
    block_length = n // num_blocks
    return BlockLayout(
        block_length=block_length,
        block_count=num_blocks,
        remainder_length=n - num_blocks * block_length,
    )


def _exceedance_level(num_blocks: int, tau: float) -> int:
    """Number of top order statistics placed above the threshold at level tau."""
    if tau <= 0:
        raise InvalidArgumentError(f"tau must be positive, got {tau}")
    return int(math.floor(num_blocks * tau))


def _threshold_at_level(sorted_used: np.ndarray, level: int) -> float:
    """Threshold = (N - level)-th smallest of the N retained observations."""
    used = sorted_used.size
    if level >= used:
        raise ThresholdOutOfRangeError(
            f"floor(num_blocks * tau) = {level} >= {used} retained observations"
        )
    return float(sorted_used[used - 1 - level])


def order_statistic_threshold(
    series: TimeSeries, layout: BlockLayout, tau: float
) -> float:
    """Data-driven threshold for level ``tau``.

    Returns the ``(N - floor(num_blocks * tau))``-th smallest value among the
    first ``N = block_count * block_length`` observations, so that about
    ``num_blocks * tau`` observations lie strictly above it.  With
    ``floor(num_blocks * tau) = 0`` the threshold is the sample maximum and
    nothing exceeds it.
    """
    used = layout.used_length
    if used > series.n:
        raise InvalidArgumentError("layout does not fit the series")
    level = _exceedance_level(layout.block_count, tau)
    sorted_used = np.sort(series.values[:used])
    return _threshold_at_level(sorted_used, level)


def _counts_above(values_used: np.ndarray, layout: BlockLayout, threshold: float) -> np.ndarray:
    exceed = values_used > threshold
    return exceed.reshape(layout.block_count, layout.block_length).sum(axis=1)


def count_exceedances(
    series: TimeSeries, layout: BlockLayout, tau: float
) -> ExceedanceCounts:
    """Per-block exceedance counts at level ``tau``.

    Strict inequality is used throughout: observations equal to the threshold
    never count.  With all-distinct values the counts sum to exactly
    ``floor(num_blocks * tau)``.
    """
    used = layout.used_length
    if used > series.n:
        raise InvalidArgumentError("layout does not fit the series")
    level = _exceedance_level(layout.block_count, tau)
    values_used = series.values[:used]
    threshold = _threshold_at_level(np.sort(values_used), level)
    counts = _counts_above(values_used, layout, threshold)
    return ExceedanceCounts(counts=counts, threshold_used=threshold, tau=float(tau))


def read_series(path: str | Path) -> TimeSeries:
    """Read a series from a text file: one decimal number per line.

    Lines starting with ``#`` are treated as header/comment lines and
    skipped; blank lines are ignored.  LF and CRLF endings are both fine.
    """
    path = Path(path)
    values = []
    header = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                header.append(line.lstrip("#").strip())
                continue
            try:
                values.append(float(line))
            except ValueError as exc:
                raise InvalidArgumentError(
                    f"{path}:{lineno}: not a number: {line!r}"
                ) from exc
    if not values:
        raise InvalidArgumentError(f"{path}: no observations found")
    meta = {"source": str(path)}
    if header:
        meta["header"] = " | ".join(header)
    return TimeSeries(values=np.asarray(values, dtype=np.float64), meta=meta)


def write_series(series: TimeSeries, path: str | Path, header: str | None = None) -> None:
    """Write a series in the one-number-per-line text format."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        if header:
            fh.write(f"# {header}\n")
        for v in series.values:
            fh.write(f"{float(v)!r}\n")
