"""Generators for the benchmark processes, with known cluster behavior.

Four stationary processes:

  squared_arch1: X[i] = (eta + lam * X[i-1]) * Z[i]^2, Z standard Gaussian.
      Started from the mean fixed point eta / (1 - lam) and burned in, since
      the stationary law has no closed form.
  max_ar1:       X[i] = max((1 - theta) * X[i-1], W[i]), W unit Frechet,
      started exactly stationary at X[1] = W[1] / theta (the stationary
      marginal is exp(-1 / (theta x))).
  ar1_uniform:   X[i] = X[i-1] / r + e[i], e uniform on {0, 1/r, .., (r-1)/r},
      started exactly stationary at X[1] ~ uniform(0, 1).
  iid_gaussian:  independence baseline (extremal index 1, unit clusters).

Gaussian and uniform variates come from numpy's PCG64 ``Generator``; unit
Frechet is sampled by inverse CDF, W = -1 / log(U) with U in the open unit
interval.  A given (kind, params, n, seed) always reproduces the same series
for a fixed numpy version.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import InvalidArgumentError
from .panjer import ClusterSizePmf
from .series import TimeSeries

__all__ = [
    "PROCESS_KINDS",
    "ProcessSpec",
    "GroundTruth",
    "simulate",
    "ground_truth",
    "exact_ground_truth",
    "derive_seed",
]

PROCESS_KINDS = ("squared_arch1", "max_ar1", "ar1_uniform", "iid_gaussian")

_DEFAULT_PARAMS = {
    "squared_arch1": {"eta": 2e-5, "lam": 0.5},
    "max_ar1": {"theta": 0.5},
    "ar1_uniform": {"r": 4},
    "iid_gaussian": {},
}


def _validated_params(kind: str, params: Mapping[str, float]) -> dict[str, float]:
    if kind not in PROCESS_KINDS:
        raise InvalidArgumentError(
            f"unknown process kind {kind!r}; expected one of {PROCESS_KINDS}"
        )
    merged = dict(_DEFAULT_PARAMS[kind])
    for key, value in params.items():
        if key not in merged:
            raise InvalidArgumentError(f"{kind} does not take parameter {key!r}")
        merged[key] = value
    if kind == "squared_arch1":
        if merged["eta"] <= 0:
            raise InvalidArgumentError(f"eta must be > 0, got {merged['eta']}")
        if not 0 < merged["lam"] < 1:
            raise InvalidArgumentError(f"lam must be in (0, 1), got {merged['lam']}")
    elif kind == "max_ar1":
        if not 0 < merged["theta"] < 1:
            raise InvalidArgumentError(
                f"theta must be in (0, 1), got {merged['theta']}"
            )
    elif kind == "ar1_uniform":
        r = merged["r"]
        if r != int(r) or int(r) < 2:
            raise InvalidArgumentError(f"r must be an integer >= 2, got {r}")
        merged["r"] = int(r)
    return merged


@dataclass(frozen=True)
class ProcessSpec:
    """Fully parameterized, reproducible description of one simulated series."""

    kind: str
    n: int
    seed: int
    params: Mapping[str, float] = field(default_factory=dict)
    burn_in: int = 1000  # used by squared_arch1 only

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgumentError(f"n must be >= 1, got {self.n}")
        if self.burn_in < 0:
            raise InvalidArgumentError(f"burn_in must be >= 0, got {self.burn_in}")
        object.__setattr__(self, "params", _validated_params(self.kind, self.params))


@dataclass(frozen=True)
class GroundTruth:
    """Limiting extremal index and cluster-size law, truncated at size 5."""

    theta: float
    pi: ClusterSizePmf


# Values reported for these processes in the simulation literature.
_PUBLISHED = {
    "squared_arch1": GroundTruth(
        theta=0.727, pi=ClusterSizePmf((0.751, 0.168, 0.055, 0.014, 0.008))
    ),
    "max_ar1": GroundTruth(
        theta=0.5, pi=ClusterSizePmf((0.5, 0.25, 0.125, 0.0625, 0.031))
    ),
    "ar1_uniform": GroundTruth(
        theta=0.75, pi=ClusterSizePmf((0.75, 0.1875, 0.0469, 0.0117, 0.0029))
    ),
    "iid_gaussian": GroundTruth(
        theta=1.0, pi=ClusterSizePmf((1.0, 0.0, 0.0, 0.0, 0.0))
    ),
}

# max_ar1 and ar1_uniform have exactly geometric cluster sizes,
# pi(k) = theta * (1 - theta)^(k-1); the published tables round them.
_EXACT = {
    "squared_arch1": _PUBLISHED["squared_arch1"],
    "max_ar1": GroundTruth(
        theta=0.5, pi=ClusterSizePmf(tuple(0.5 * 0.5 ** (k - 1) for k in range(1, 6)))
    ),
    "ar1_uniform": GroundTruth(
        theta=0.75,
        pi=ClusterSizePmf(tuple(0.75 * 0.25 ** (k - 1) for k in range(1, 6))),
    ),
    "iid_gaussian": _PUBLISHED["iid_gaussian"],
}


def ground_truth(kind: str) -> GroundTruth:
    """Published (theta, pi) for a process kind, verbatim."""
    try:
        return _PUBLISHED[kind]
    except KeyError:
        raise InvalidArgumentError(f"unknown process kind {kind!r}") from None


def exact_ground_truth(kind: str) -> GroundTruth:
    """Like ``ground_truth`` but with exact geometric values where they exist.

    Benchmark ratios divide by these, so that e.g. pi(5) = 0.03125 for
    max_ar1 rather than the rounded 0.031.
    """
    try:
        return _EXACT[kind]
    except KeyError:
        raise InvalidArgumentError(f"unknown process kind {kind!r}") from None


def _open_uniform(rng: np.random.Generator, size: int) -> np.ndarray:
    """Uniforms in the open interval (0, 1); exact-zero draws are resampled."""
    u = rng.random(size)
    zero = u == 0.0
    while np.any(zero):
        u[zero] = rng.random(int(zero.sum()))
        zero = u == 0.0
    return u


def squared_arch1_path(
    z: np.ndarray, eta: float, lam: float, x0: float
) -> np.ndarray:
    """Iterate X[i] = (eta + lam * X[i-1]) * z[i]^2 from x0, one value per z."""
    out = np.empty(len(z))
    x = x0
    for i, zi in enumerate(z):
        x = (eta + lam * x) * zi * zi
        out[i] = x
    return out


def max_ar1_path(w: np.ndarray, theta: float) -> np.ndarray:
    """X[0] = w[0] / theta, then X[i] = max((1 - theta) * X[i-1], w[i])."""
    out = np.empty(len(w))
    x = w[0] / theta
    out[0] = x
    keep = 1.0 - theta
    for i in range(1, len(w)):
        x = max(keep * x, w[i])
        out[i] = x
    return out


def ar1_uniform_path(x1: float, eps: np.ndarray, r: int) -> np.ndarray:
    """X[0] = x1, then X[i] = X[i-1] / r + eps[i-1]."""
    out = np.empty(len(eps) + 1)
    x = x1
    out[0] = x
    for i, e in enumerate(eps):
        x = x / r + e
        out[i + 1] = x
    return out


def simulate(spec: ProcessSpec) -> TimeSeries:
    """Generate one series; bit-identical for identical specs."""
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed))
    p = spec.params
    if spec.kind == "squared_arch1":
        z = rng.standard_normal(spec.burn_in + spec.n)
        x0 = p["eta"] / (1.0 - p["lam"])
        values = squared_arch1_path(z, p["eta"], p["lam"], x0)[spec.burn_in :]
    elif spec.kind == "max_ar1":
        w = -1.0 / np.log(_open_uniform(rng, spec.n))
        values = max_ar1_path(w, p["theta"])
    elif spec.kind == "ar1_uniform":
        r = int(p["r"])
        x1 = rng.random()
        eps = rng.integers(0, r, size=spec.n - 1) / r
        values = ar1_uniform_path(x1, eps, r)
    else:  # iid_gaussian
        values = rng.standard_normal(spec.n)
    meta = {
        "kind": spec.kind,
        "params": ",".join(f"{k}={v}" for k, v in sorted(p.items())),
        "n": str(spec.n),
        "seed": str(spec.seed),
    }
    if spec.kind == "squared_arch1":
        meta["burn_in"] = str(spec.burn_in)
    return TimeSeries(values=values, meta=meta)


def derive_seed(master_seed: int, *indices: int) -> int:
    """Stable 64-bit child seed from a master seed and index coordinates.

    Used to give every replication of an experiment its own documented
    stream: parallel and serial runs see the same seeds.
    """
    ss = np.random.SeedSequence((master_seed, *indices))
    return int(ss.generate_state(1, np.uint64)[0])
