"""Extremal index estimators built on the compound pmf and its inversion.

Three moment identities of the limiting exceedance count N and cluster size
Z give three estimators (k = number of blocks, m = size cutoff):

  theta1: P(N = 0) = exp(-theta * tau)        -> -log p(0) / tau
  theta2: E(Z) = 1 / theta                    -> 1 / sum_{j<=m} j * pi(j)
  theta3: V(N) = theta * tau * E(Z^2)         -> sum_{j<=m} (j-tau)^2 p(j)
                                                 / (tau * sum_{j<=m} j^2 pi(j))

theta2/theta3 consume the clipped cluster-size estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .compound import CompoundPmf, empirical_compound
from .errors import (
    ClusterExtremesError,
    DegenerateCompoundError,
    EmptyClusterMomentError,
)
from .panjer import ClusterSizePmf, panjer_invert
from .series import TimeSeries, count_exceedances, make_layout

__all__ = [
    "ExtremalIndexReport",
    "theta1",
    "theta2",
    "theta3",
    "theta1_avar",
    "full_report",
]


def theta1(pmf: CompoundPmf) -> float:
    """Extremal index from the zero-count probability: -log p(0) / tau."""
    p0 = pmf.probs[0]
    if not 0.0 < p0 < 1.0:
        raise DegenerateCompoundError(
            f"zero-count probability {p0} is degenerate for theta1"
        )
    return -math.log(p0) / pmf.tau


def theta2(pi: ClusterSizePmf, max_size: int) -> float:
    """Reciprocal truncated mean cluster size: 1 / sum_{j<=m} j * pi(j)."""
    first_moment = math.fsum(j * pi.prob(j) for j in range(1, max_size + 1))
    if first_moment <= 0.0:
        raise EmptyClusterMomentError("truncated mean cluster size is zero")
    return 1.0 / first_moment


def theta3(pmf: CompoundPmf, pi: ClusterSizePmf, max_size: int, tau: float) -> float:
    """Variance-matching estimator.

    Ratio of the truncated second central moment of the block counts around
    tau to tau times the truncated second moment of the cluster sizes.
    """
    second_moment = math.fsum(j * j * pi.prob(j) for j in range(1, max_size + 1))
    if second_moment <= 0.0:
        raise EmptyClusterMomentError("truncated cluster-size second moment is zero")
    numer = math.fsum((j - tau) ** 2 * pmf.prob(j) for j in range(0, max_size + 1))
    return numer / (tau * second_moment)


def theta1_avar(theta: float, pi: ClusterSizePmf, tau: float) -> float:
    """Asymptotic variance of theta1 on the sqrt(num_blocks) scale.

    tau^-2 * (exp(theta*tau) - 2*theta*tau - 1 + theta^3 * tau * sum j^2 pi(j)),
    with the cluster-size sum truncated at pi's support (estimates have finite
    support anyway).  For a mean-coherent pair (sum j*pi(j) = 1/theta) the
    value is nonnegative; incoherent plug-ins can drive it slightly negative.
    """
    if theta <= 0 or tau <= 0:
        raise EmptyClusterMomentError("theta and tau must be positive")
    x = theta * tau
    second_moment = math.fsum(j * j * p for j, p in enumerate(pi.probs, start=1))
    return (math.exp(x) - 2.0 * x - 1.0 + theta**3 * tau * second_moment) / tau**2


@dataclass(frozen=True)
class ExtremalIndexReport:
    """Bundle of the three estimators plus the theta1 variance plug-in.

    Estimators that could not be computed are None, with the failure recorded
    in ``errors`` as (estimator name, error code) pairs.  ``theta1_avar`` is
    the plug-in value clamped at 0 (see ``theta1_avar``); divide by the number
    of blocks to get the variance of theta1 itself.
    """

    theta1: float | None
    theta2_m: float | None
    theta3_m: float | None
    theta1_avar: float | None
    m_used: int
    tau_used: float
    errors: tuple[tuple[str, str], ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "theta1": self.theta1,
            "theta2": self.theta2_m,
            "theta3": self.theta3_m,
            "m": self.m_used,
            "tau": self.tau_used,
            "theta1_avar": self.theta1_avar,
            "errors": [
                {"estimator": name, "error": code} for name, code in self.errors
            ],
        }


def report_from_pmf(
    pmf: CompoundPmf, max_size: int, pi: ClusterSizePmf | None = None
) -> ExtremalIndexReport:
    """Assemble the report from an already-computed compound pmf."""
    errors: list[tuple[str, str]] = []
    tau = pmf.tau

    if pi is None:
        try:
            pi = panjer_invert(pmf, max_size)
        except ClusterExtremesError as exc:
            errors.append(("cluster_pmf", exc.code))
            pi = None

    t1 = None
    try:
        t1 = theta1(pmf)
    except ClusterExtremesError as exc:
        errors.append(("theta1", exc.code))

    t2 = t3 = avar = None
    if pi is None:
        errors.append(("theta2", DegenerateCompoundError.code))
        errors.append(("theta3", DegenerateCompoundError.code))
    else:
        try:
            t2 = theta2(pi, max_size)
        except ClusterExtremesError as exc:
            errors.append(("theta2", exc.code))
        try:
            t3 = theta3(pmf, pi, max_size, tau)
        except ClusterExtremesError as exc:
            errors.append(("theta3", exc.code))
    if t1 is not None and pi is not None:
        avar = max(0.0, theta1_avar(t1, pi, tau))
    else:
        errors.append(("theta1_avar", DegenerateCompoundError.code))

    return ExtremalIndexReport(
        theta1=t1,
        theta2_m=t2,
        theta3_m=t3,
        theta1_avar=avar,
        m_used=max_size,
        tau_used=tau,
        errors=tuple(errors),
    )


def full_report(
    series: TimeSeries, num_blocks: int, tau: float, max_size: int
) -> ExtremalIndexReport:
    """Run the whole pipeline: counts -> compound pmf -> inversion -> report.

    Estimator failures (constant series, degenerate levels, empty moments) are
    reported per estimator instead of raising.
    """
    layout = make_layout(series.n, num_blocks)
    counts = count_exceedances(series, layout, tau)
    pmf = empirical_compound(counts, num_blocks)
    return report_from_pmf(pmf, max_size)
