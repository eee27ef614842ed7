"""Empirical distribution of per-block exceedance counts.

``empirical_compound`` gives the distribution at a single level tau.  Because
the threshold is an order statistic, the distribution changes only when
``floor(num_blocks * tau)`` changes, i.e. at tau in {1/k, 2/k, ...} for k
blocks.  ``compound_profile`` exploits this and represents the whole map
``tau -> pmf`` over an interval (sigma, phi] as a small list of constant
pieces, which is what makes the smoothed estimators exact integrals rather
than quadratures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, ThresholdOutOfRangeError
from .series import BlockLayout, ExceedanceCounts, TimeSeries, make_layout

__all__ = [
    "CompoundPmf",
    "ProfilePiece",
    "CompoundProfile",
    "empirical_compound",
    "compound_profile",
]


@dataclass(frozen=True)
class CompoundPmf:
    """Finite pmf of the number of exceedances in a block, p(0..M).

    Empirical pmfs have exact rational entries (multiples of 1/num_blocks)
    summing to 1.  Theoretical pmfs produced by the forward recursion are
    truncated at M; the missing tail is exposed as ``truncation_mass`` and is
    never silently folded into the last entry.
    """

    probs: tuple[float, ...]
    tau: float

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if len(probs) < 1:
            raise InvalidArgumentError("pmf needs at least the zero-count entry")
        if self.tau <= 0:
            raise InvalidArgumentError(f"tau must be positive, got {self.tau}")
        total = 0.0
        for p in probs:
            if not -1e-12 <= p <= 1 + 1e-12:
                raise InvalidArgumentError(f"pmf entry out of [0, 1]: {p}")
            total += p
        if total > 1 + 1e-9:
            raise InvalidArgumentError(f"pmf mass exceeds 1: {total}")
        object.__setattr__(self, "probs", probs)

    @property
    def support_max(self) -> int:
        return len(self.probs) - 1

    @property
    def truncation_mass(self) -> float:
        """Mass beyond the stored support (0 for empirical pmfs)."""
        return max(0.0, 1.0 - math.fsum(self.probs))

    def prob(self, m: int) -> float:
        """p(m), with p(m) = 0 beyond the stored support."""
        if 0 <= m < len(self.probs):
            return self.probs[m]
        return 0.0

    def to_json_dict(self) -> dict:
        return {"tau": self.tau, "probs": list(self.probs)}


def empirical_compound(counts: ExceedanceCounts, num_blocks: int) -> CompoundPmf:
    """Relative frequencies of the per-block counts.

    ``probs[m]`` is the fraction of the ``num_blocks`` blocks whose count is
    exactly m, so entries are exact multiples of 1/num_blocks.
    """
    arr = np.asarray(counts.counts)
    if arr.size != num_blocks:
        raise InvalidArgumentError(
            f"expected {num_blocks} block counts, got {arr.size}"
        )
    freq = np.bincount(arr, minlength=1)
    return CompoundPmf(probs=tuple(freq / num_blocks), tau=counts.tau)


@dataclass(frozen=True)
class ProfilePiece:
    """One constant piece of the tau profile.

    The pmf value applies on the tau interval between ``lo`` and ``hi``;
    ``level`` is the corresponding value of ``floor(num_blocks * tau)``.
    """

    lo: float
    hi: float
    level: int
    probs: tuple[float, ...]

    @property
    def length(self) -> float:
        return max(0.0, self.hi - self.lo)


class CompoundProfile:
    """Piecewise-constant map tau -> empirical compound pmf on (sigma, phi].

    Evaluation at any tau in the interval agrees exactly with
    ``empirical_compound(count_exceedances(series, layout, tau), k)`` because
    both paths reduce tau to the same integer level.
    """

    def __init__(
        self,
        num_blocks: int,
        sigma: float,
        phi: float,
        pieces: list[ProfilePiece],
    ):
        self.num_blocks = num_blocks
        self.sigma = sigma
        self.phi = phi
        self.pieces = pieces
        self._by_level = {piece.level: piece.probs for piece in pieces}

    @property
    def breakpoints(self) -> list[float]:
        """Levels j/num_blocks inside (sigma, phi] where the pmf can change."""
        return [p.lo for p in self.pieces[1:]]

    def at(self, tau: float) -> CompoundPmf:
        """Exact pointwise pmf at ``tau``; tau must fall inside the profile."""
        level = int(math.floor(self.num_blocks * tau))
        try:
            probs = self._by_level[level]
        except KeyError:
            raise InvalidArgumentError(
                f"tau={tau} is outside the profiled interval "
                f"({self.sigma}, {self.phi}]"
            ) from None
        return CompoundPmf(probs=probs, tau=float(tau))


def compound_profile(
    series: TimeSeries, num_blocks: int, sigma: float, phi: float
) -> CompoundProfile:
    """Build the tau profile of the empirical compound distribution.

    Walks the order statistics from the ``floor(k * sigma)`` largest down to
    the ``floor(k * phi)`` largest, lowering the threshold one order statistic
    at a time and updating the per-block counts incrementally; whole runs of
    tied values enter together, so ties behave exactly as in the direct
    computation.
    """
    if not 0 < sigma < phi:
        raise InvalidArgumentError(f"need 0 < sigma < phi, got ({sigma}, {phi})")
    layout = make_layout(series.n, num_blocks)
    if phi >= layout.block_length:
        raise InvalidArgumentError(
            f"phi={phi} must be below the block length {layout.block_length}"
        )
    used = layout.used_length
    values = series.values[:used]
    sorted_vals = np.sort(values)

    level_lo = int(math.floor(num_blocks * sigma))
    level_hi = int(math.floor(num_blocks * phi))
    if level_hi >= used:
        raise ThresholdOutOfRangeError(
            f"floor(num_blocks * phi) = {level_hi} >= {used} retained observations"
        )

    # Positions in descending value order; block membership of each position.
    desc = np.argsort(-values, kind="stable")
    block_of = desc // layout.block_length

    block_counts = np.zeros(num_blocks, dtype=np.int64)
    hist = np.zeros(layout.block_length + 1, dtype=np.int64)
    hist[0] = num_blocks
    max_count = 0
    marked = 0

    probs_by_level: dict[int, tuple[float, ...]] = {}
    for level in range(level_lo, level_hi + 1):
        threshold = sorted_vals[used - 1 - level]
        # Strict exceedances: values above the threshold, whole tie-runs at once.
        target = used - int(np.searchsorted(sorted_vals, threshold, side="right"))
        while marked < target:
            b = block_of[marked]
            c = block_counts[b]
            hist[c] -= 1
            hist[c + 1] += 1
            block_counts[b] = c + 1
            if c + 1 > max_count:
                max_count = c + 1
            marked += 1
        probs_by_level[level] = tuple((hist[: max_count + 1] / num_blocks).tolist())

    bounds = [sigma]
    for level in range(level_lo + 1, level_hi + 1):
        bounds.append(min(level / num_blocks, phi))
    bounds.append(phi)

    pieces = [
        ProfilePiece(
            lo=bounds[i],
            hi=bounds[i + 1],
            level=level_lo + i,
            probs=probs_by_level[level_lo + i],
        )
        for i in range(level_hi - level_lo + 1)
    ]
    return CompoundProfile(num_blocks=num_blocks, sigma=sigma, phi=phi, pieces=pieces)
