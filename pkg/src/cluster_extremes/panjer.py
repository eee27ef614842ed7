"""Compound-Poisson recursion, its inversion, and exact tau-smoothing.

A compound Poisson count with rate ``theta * tau`` and positive integer
severities distributed as ``pi`` has pmf

    p(0) = exp(-theta * tau)
    p(m) = -(log p(0) / m) * sum_{j=1..m} j * pi(j) * p(m - j)

(the classical recursion for Poisson claim counts).  Solving the m-th line
for pi(m) inverts the recursion: given the compound pmf, the severity pmf
comes out one entry at a time,

    chi(m) = -(p(m) + (log p(0) / m) * sum_{j<m} j * pi(j) * p(m - j))
             / (log p(0) * p(0)).

Estimated compound pmfs carry sampling noise, so raw chi values can fall
outside [0, 1]; the estimator clips each entry into [0, 1 - mass so far] and
feeds the clipped values back into the convolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .compound import CompoundPmf, CompoundProfile, compound_profile
from .errors import DegenerateCompoundError, InvalidArgumentError
from .series import TimeSeries

__all__ = [
    "ClusterSizePmf",
    "CompoundPoissonSpec",
    "SmoothedEstimates",
    "panjer_forward",
    "panjer_invert_raw",
    "panjer_invert",
    "smoothed_from_profile",
    "smooth_cluster_pmf",
    "smooth_theta1",
]

DEFAULT_MAX_CLUSTER_SIZE = 8


@dataclass(frozen=True)
class ClusterSizePmf:
    """Sub-probability vector over cluster sizes 1..m_max.

    ``probs[j - 1]`` is the mass at cluster size j.  Estimates are clipped so
    that every entry lies in [0, 1] and the total never exceeds 1;
    ``clipped_at`` records the (1-based) sizes where a clip bound was active.
    """

    probs: tuple[float, ...]
    clipped_at: tuple[int, ...] = ()

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if len(probs) < 1:
            raise InvalidArgumentError("cluster-size pmf must have m_max >= 1")
        total = 0.0
        for p in probs:
            if not -1e-12 <= p <= 1 + 1e-12:
                raise InvalidArgumentError(f"cluster-size entry out of [0, 1]: {p}")
            total += p
        if total > 1 + 1e-12:
            raise InvalidArgumentError(f"cluster-size mass exceeds 1: {total}")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "clipped_at", tuple(int(i) for i in self.clipped_at))

    @property
    def m_max(self) -> int:
        return len(self.probs)

    @property
    def mass(self) -> float:
        return math.fsum(self.probs)

    def prob(self, size: int) -> float:
        """pi(size) for 1-based cluster sizes, 0 beyond m_max."""
        if 1 <= size <= len(self.probs):
            return self.probs[size - 1]
        return 0.0

    def to_json_dict(self) -> dict:
        return {
            "m_max": self.m_max,
            "pi": list(self.probs),
            "clipped_at": list(self.clipped_at),
        }


@dataclass(frozen=True)
class CompoundPoissonSpec:
    """Parameters of a compound Poisson exceedance-count law.

    ``cluster_sizes`` must be a genuine probability (mass 1 up to 1e-12);
    sub-probability estimates are not valid inputs for the forward model.
    """

    theta: float
    tau: float
    cluster_sizes: ClusterSizePmf

    def __post_init__(self):
        if not 0 < self.theta <= 1:
            raise InvalidArgumentError(f"theta must be in (0, 1], got {self.theta}")
        if self.tau <= 0:
            raise InvalidArgumentError(f"tau must be positive, got {self.tau}")
        if abs(self.cluster_sizes.mass - 1.0) > 1e-12:
            raise InvalidArgumentError(
                f"cluster-size law must sum to 1, got {self.cluster_sizes.mass}"
            )


def panjer_forward(spec: CompoundPoissonSpec, truncation: int | None = None) -> CompoundPmf:
    """Compound pmf p(0..M) by the forward recursion.

    M defaults to ``max(40, 10 * m_max)``.  The mass beyond M is available as
    ``truncation_mass`` on the result and equals P(count > M).
    """
    m_max = spec.cluster_sizes.m_max
    M = truncation if truncation is not None else max(40, 10 * m_max)
    if M < 1:
        raise InvalidArgumentError(f"truncation must be >= 1, got {M}")
    rate = spec.theta * spec.tau
    pi = spec.cluster_sizes.probs
    p = [0.0] * (M + 1)
    p[0] = math.exp(-rate)
    for m in range(1, M + 1):
        acc = 0.0
        for j in range(1, min(m, m_max) + 1):
            acc += j * pi[j - 1] * p[m - j]
        p[m] = rate * acc / m
    return CompoundPmf(probs=tuple(p), tau=spec.tau)


def _invert(probs: tuple[float, ...], m_max: int):
    """Run the clipped inverse recursion; returns (raw, clipped, clip sizes)."""
    p0 = probs[0]
    if not 0.0 < p0 < 1.0:
        raise DegenerateCompoundError(
            f"zero-count probability {p0} is degenerate; "
            "either no block or every block has an exceedance"
        )
    log_p0 = math.log(p0)
    denom = log_p0 * p0
    support = len(probs)

    raw: list[float] = []
    clipped: list[float] = []
    clip_sizes: list[int] = []
    mass = 0.0
    for m in range(1, m_max + 1):
        pm = probs[m] if m < support else 0.0
        conv = 0.0
        for j in range(1, m):
            pmj = probs[m - j] if m - j < support else 0.0
            conv += j * clipped[j - 1] * pmj
        chi = -(pm + log_p0 * conv / m) / denom
        value = max(0.0, min(chi, 1.0 - mass))
        if value != chi:
            clip_sizes.append(m)
        raw.append(chi)
        clipped.append(value)
        mass += value
    return raw, clipped, clip_sizes


def panjer_invert_raw(pmf: CompoundPmf, m_max: int) -> list[float]:
    """Raw inverse-recursion values chi(1..m_max), before clipping.

    The convolution inside still uses the clipped estimates for the earlier
    sizes, exactly as in the estimator; only the returned values are
    unclipped.  Exposed for testing and diagnostics.
    """
    raw, _, _ = _invert(pmf.probs, m_max)
    return raw


def panjer_invert(pmf: CompoundPmf, m_max: int = DEFAULT_MAX_CLUSTER_SIZE) -> ClusterSizePmf:
    """Cluster-size estimate: inverse recursion clipped into a sub-probability."""
    if m_max < 1:
        raise InvalidArgumentError(f"m_max must be >= 1, got {m_max}")
    _, clipped, clip_sizes = _invert(pmf.probs, m_max)
    return ClusterSizePmf(probs=tuple(clipped), clipped_at=tuple(clip_sizes))


@dataclass(frozen=True)
class SmoothedEstimates:
    """Exact tau-averages over a profile, with degenerate-piece bookkeeping.

    Pieces whose zero-count probability is 0 or 1 are excluded and the
    averages renormalized by the total included length; ``excluded_length``
    reports how much of (sigma, phi] was dropped.
    """

    cluster_pmf: ClusterSizePmf | None
    theta1: float
    piece_count: int
    degenerate_count: int
    included_length: float
    excluded_length: float


def smoothed_from_profile(profile: CompoundProfile, m_max: int) -> SmoothedEstimates:
    """Average the cluster-size and theta1 estimators over the profile.

    On each constant piece the cluster-size estimate is a constant vector, so
    its integral is length-weighted summation; theta1 is c/tau with constant
    c = -log p(0), whose piece integral is c * log(hi / lo).  Pieces are
    accumulated in ascending tau order so results do not depend on how the
    caller parallelizes.

    With ``m_max = 0`` the inversion is skipped and only theta1 is averaged.
    """
    acc_pi = [0.0] * m_max
    clip_union: set[int] = set()
    acc_theta1 = 0.0
    included = 0.0
    excluded = 0.0
    degenerate = 0
    for piece in profile.pieces:
        length = piece.length
        if length <= 0.0:
            continue
        p0 = piece.probs[0]
        if not 0.0 < p0 < 1.0:
            degenerate += 1
            excluded += length
            continue
        if m_max > 0:
            _, clipped, clip_sizes = _invert(piece.probs, m_max)
            for i in range(m_max):
                acc_pi[i] += length * clipped[i]
            clip_union.update(clip_sizes)
        acc_theta1 += -math.log(p0) * math.log(piece.hi / piece.lo)
        included += length
    if included <= 0.0:
        raise DegenerateCompoundError(
            "every piece of the profile is degenerate; nothing to smooth"
        )
    cluster = None
    if m_max > 0:
        cluster = ClusterSizePmf(
            probs=tuple(v / included for v in acc_pi),
            clipped_at=tuple(sorted(clip_union)),
        )
    return SmoothedEstimates(
        cluster_pmf=cluster,
        theta1=acc_theta1 / included,
        piece_count=len(profile.pieces),
        degenerate_count=degenerate,
        included_length=included,
        excluded_length=excluded,
    )


def smooth_cluster_pmf(
    series: TimeSeries,
    num_blocks: int,
    sigma: float,
    phi: float,
    m_max: int = DEFAULT_MAX_CLUSTER_SIZE,
) -> ClusterSizePmf:
    """Tau-averaged cluster-size estimate over (sigma, phi], computed exactly."""
    if m_max < 1:
        raise InvalidArgumentError(f"m_max must be >= 1, got {m_max}")
    profile = compound_profile(series, num_blocks, sigma, phi)
    result = smoothed_from_profile(profile, m_max)
    assert result.cluster_pmf is not None
    return result.cluster_pmf


def smooth_theta1(series: TimeSeries, num_blocks: int, sigma: float, phi: float) -> float:
    """Tau-averaged theta1 over (sigma, phi], computed exactly."""
    profile = compound_profile(series, num_blocks, sigma, phi)
    return smoothed_from_profile(profile, m_max=0).theta1
