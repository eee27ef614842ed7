"""Monte Carlo benchmark: estimator/truth ratios versus the number of blocks.

For each configured process, ``replications`` series are simulated; every
series is evaluated at every block count in ``k_grid`` (re-using the series
across the grid keeps comparisons between block counts low-variance).  For
each estimator and target quantity the harness records the mean of the
estimate/truth ratios, the RMSE of the ratios around 1, and how many
replications failed for that cell.

Replications run as independent work units with seeds derived from
(master_seed, process index, replication index) and are aggregated in
replication order, so the output is byte-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .comparators import TwoScaleSpec, blocks_theta, hsing_pi, runs_theta, two_scale_threshold
from .compound import compound_profile, empirical_compound
from .errors import ClusterExtremesError, InvalidArgumentError
from .extremal import theta1, theta2, theta3
from .panjer import panjer_invert, smoothed_from_profile
from .series import count_exceedances, make_layout
from .simulators import (
    PROCESS_KINDS,
    GroundTruth,
    ProcessSpec,
    derive_seed,
    exact_ground_truth,
    simulate,
)

__all__ = [
    "ExperimentConfig",
    "CellStats",
    "RatioTable",
    "run_experiment",
    "emit_table",
    "load_config",
    "ESTIMATORS",
]

# Estimators and the quantities they target, in output order.
# pi estimators are compared against pi(1)..pi(5); theta estimators against theta.
PI_ESTIMATORS = ("pi_tau", "pi_smoothed", "pi_hsing")
THETA_ESTIMATORS = (
    "theta1",
    "theta2",
    "theta3",
    "theta1_smoothed",
    "theta_blocks",
    "theta_runs",
)
ESTIMATORS = PI_ESTIMATORS + THETA_ESTIMATORS
PI_SIZES = (1, 2, 3, 4, 5)

CSV_HEADER = "process,estimator,quantity,k_n,mean_ratio,rmse_ratio,failures"


@dataclass(frozen=True)
class ExperimentConfig:
    processes: tuple[str, ...] = ("squared_arch1", "max_ar1", "ar1_uniform")
    n: int = 2000
    replications: int = 500
    k_grid: tuple[int, ...] = tuple(range(50, 251, 10))
    tau: float = 1.0
    m_max: int = 8
    sigma: float = 0.7
    phi: float = 1.3
    master_seed: int = 12345

    def __post_init__(self):
        for kind in self.processes:
            if kind not in PROCESS_KINDS:
                raise InvalidArgumentError(f"unknown process kind {kind!r}")
        if not self.processes:
            raise InvalidArgumentError("need at least one process")
        if self.replications < 1:
            raise InvalidArgumentError("replications must be >= 1")
        if not self.k_grid:
            raise InvalidArgumentError("k_grid must be non-empty")
        for k in self.k_grid:
            if not 1 <= k <= self.n:
                raise InvalidArgumentError(f"k_n = {k} outside [1, n = {self.n}]")
        if not 0 < self.sigma < self.phi:
            raise InvalidArgumentError(
                f"need 0 < sigma < phi, got ({self.sigma}, {self.phi})"
            )
        if self.tau <= 0:
            raise InvalidArgumentError(f"tau must be positive, got {self.tau}")
        if self.m_max < 1:
            raise InvalidArgumentError(f"m_max must be >= 1, got {self.m_max}")


@dataclass
class CellStats:
    """Aggregates for one (process, estimator, quantity, k_n) cell."""

    mean_ratio: float | None
    rmse_ratio: float | None
    failures: int


@dataclass
class RatioTable:
    """Stable-ordered benchmark results."""

    config: ExperimentConfig
    cells: dict[tuple[str, str, str, int], CellStats] = field(default_factory=dict)

    def rows(self):
        """(process, estimator, quantity, k_n, stats) in output order."""
        for key in self._ordered_keys():
            process, estimator, quantity, k = key
            yield process, estimator, quantity, k, self.cells[key]

    def _ordered_keys(self):
        for process in self.config.processes:
            quantities = _quantities_for(process)
            for estimator in ESTIMATORS:
                targets = quantities if estimator in PI_ESTIMATORS else ("theta",)
                for quantity in targets:
                    for k in self.config.k_grid:
                        key = (process, estimator, quantity, k)
                        if key in self.cells:
                            yield key


def _quantities_for(process: str) -> tuple[str, ...]:
    truth = exact_ground_truth(process)
    return tuple(f"pi{j}" for j in PI_SIZES if truth.pi.prob(j) > 0)


def _evaluate_series(series, k, tau, m_max, sigma, phi):
    """All estimators for one series at one block count.

    Returns {(estimator, quantity_tag): value-or-error-code}; quantity_tag is
    a cluster size for pi estimators and "theta" otherwise.
    """
    out: dict[tuple[str, object], float | str] = {}

    def fail(estimator, quantities, code):
        for q in quantities:
            out[(estimator, q)] = code

    profile = None
    try:
        profile = compound_profile(series, k, sigma, phi)
    except ClusterExtremesError:
        profile = None

    try:
        if profile is not None and sigma < tau <= phi:
            pmf = profile.at(tau)
        else:
            layout = make_layout(series.n, k)
            pmf = empirical_compound(count_exceedances(series, layout, tau), k)
    except ClusterExtremesError as exc:
        fail("pi_tau", PI_SIZES, exc.code)
        fail("theta1", ("theta",), exc.code)
        fail("theta2", ("theta",), exc.code)
        fail("theta3", ("theta",), exc.code)
        pmf = None

    pi_hat = None
    if pmf is not None:
        try:
            pi_hat = panjer_invert(pmf, m_max)
            for j in PI_SIZES:
                out[("pi_tau", j)] = pi_hat.prob(j)
        except ClusterExtremesError as exc:
            fail("pi_tau", PI_SIZES, exc.code)
            fail("theta2", ("theta",), exc.code)
            fail("theta3", ("theta",), exc.code)
        try:
            out[("theta1", "theta")] = theta1(pmf)
        except ClusterExtremesError as exc:
            fail("theta1", ("theta",), exc.code)
        if pi_hat is not None:
            try:
                out[("theta2", "theta")] = theta2(pi_hat, m_max)
            except ClusterExtremesError as exc:
                fail("theta2", ("theta",), exc.code)
            try:
                out[("theta3", "theta")] = theta3(pmf, pi_hat, m_max, tau)
            except ClusterExtremesError as exc:
                fail("theta3", ("theta",), exc.code)

    if profile is None:
        fail("pi_smoothed", PI_SIZES, "invalid-argument")
        fail("theta1_smoothed", ("theta",), "invalid-argument")
    else:
        try:
            smoothed = smoothed_from_profile(profile, m_max)
            for j in PI_SIZES:
                out[("pi_smoothed", j)] = smoothed.cluster_pmf.prob(j)
            out[("theta1_smoothed", "theta")] = smoothed.theta1
        except ClusterExtremesError as exc:
            fail("pi_smoothed", PI_SIZES, exc.code)
            fail("theta1_smoothed", ("theta",), exc.code)

    try:
        two_scale = TwoScaleSpec.for_study(series.n, k)
    except ClusterExtremesError as exc:
        fail("pi_hsing", PI_SIZES, exc.code)
        fail("theta_blocks", ("theta",), exc.code)
        fail("theta_runs", ("theta",), exc.code)
        return out

    try:
        pi_blocks = hsing_pi(series, k, tau, two_scale, max(PI_SIZES))
        for j in PI_SIZES:
            out[("pi_hsing", j)] = pi_blocks.prob(j)
    except ClusterExtremesError as exc:
        fail("pi_hsing", PI_SIZES, exc.code)
    try:
        out[("theta_blocks", "theta")] = blocks_theta(series, k, tau, two_scale)
    except ClusterExtremesError as exc:
        fail("theta_blocks", ("theta",), exc.code)
    try:
        u = two_scale_threshold(series, tau, two_scale)
        out[("theta_runs", "theta")] = runs_theta(series, u, two_scale.run_length)
    except ClusterExtremesError as exc:
        fail("theta_runs", ("theta",), exc.code)
    return out


def _replicate(args):
    """One work unit: simulate a series, evaluate the whole k grid on it."""
    kind, n, seed, k_grid, tau, m_max, sigma, phi = args
    series = simulate(ProcessSpec(kind=kind, n=n, seed=seed))
    results = []
    for k in k_grid:
        for (estimator, qtag), value in _evaluate_series(
            series, k, tau, m_max, sigma, phi
        ).items():
            results.append((estimator, qtag, k, value))
    return results


def _ratio(value: float, estimator: str, qtag, truth: GroundTruth) -> float:
    if estimator in PI_ESTIMATORS:
        return value / truth.pi.prob(qtag)
    return value / truth.theta


def run_experiment(config: ExperimentConfig, workers: int = 1) -> RatioTable:
    """Run the full benchmark; deterministic for a fixed master seed."""
    if workers < 1:
        raise InvalidArgumentError(f"workers must be >= 1, got {workers}")

    tasks = []
    for proc_idx, kind in enumerate(config.processes):
        for rep in range(config.replications):
            seed = derive_seed(config.master_seed, proc_idx, rep)
            tasks.append(
                (
                    kind,
                    config.n,
                    seed,
                    config.k_grid,
                    config.tau,
                    config.m_max,
                    config.sigma,
                    config.phi,
                )
            )

    if workers == 1:
        all_results = [_replicate(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            all_results = list(pool.map(_replicate, tasks, chunksize=8))

    # Accumulate in replication order per cell; the summation order is fixed
    # regardless of which worker produced which result.
    sums: dict[tuple, list] = {}
    for task_idx, results in enumerate(all_results):
        proc_idx = task_idx // config.replications
        process = config.processes[proc_idx]
        truth = exact_ground_truth(process)
        for estimator, qtag, k, value in results:
            if estimator in PI_ESTIMATORS:
                if truth.pi.prob(qtag) <= 0:
                    continue
                quantity = f"pi{qtag}"
            else:
                quantity = "theta"
            key = (process, estimator, quantity, k)
            cell = sums.setdefault(key, [0.0, 0.0, 0, 0])
            if isinstance(value, str):
                cell[3] += 1
                continue
            ratio = _ratio(value, estimator, qtag, truth)
            cell[0] += ratio
            cell[1] += (ratio - 1.0) ** 2
            cell[2] += 1

    table = RatioTable(config=config)
    for key, (total, sq_total, count, failures) in sums.items():
        if count > 0:
            table.cells[key] = CellStats(
                mean_ratio=total / count,
                rmse_ratio=math.sqrt(sq_total / count),
                failures=failures,
            )
        else:
            table.cells[key] = CellStats(
                mean_ratio=None, rmse_ratio=None, failures=failures
            )
    return table


def emit_table(table: RatioTable, path: str | Path) -> None:
    """Write the ratio table as CSV with a stable row order and LF endings."""
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            fh.write(CSV_HEADER + "\n")
            for process, estimator, quantity, k, stats in table.rows():
                mean = "" if stats.mean_ratio is None else repr(stats.mean_ratio)
                rmse = "" if stats.rmse_ratio is None else repr(stats.rmse_ratio)
                fh.write(
                    f"{process},{estimator},{quantity},{k},{mean},{rmse},{stats.failures}\n"
                )
    except OSError as exc:
        raise InvalidArgumentError(f"cannot write table to {path}: {exc}") from exc


def _parse_k_grid(text: str) -> tuple[int, ...]:
    text = text.strip()
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        if len(parts) == 2:
            lo, hi = parts
            step = 10
        elif len(parts) == 3:
            lo, hi, step = parts
        else:
            raise InvalidArgumentError(f"bad k_grid range {text!r}")
        if step < 1 or hi < lo:
            raise InvalidArgumentError(f"bad k_grid range {text!r}")
        return tuple(range(lo, hi + 1, step))
    return tuple(int(p) for p in text.split(",") if p.strip())


def load_config(path: str | Path, overrides: dict | None = None) -> ExperimentConfig:
    """Read a key=value config file; later CLI overrides win.

    Recognized keys: processes, n, replications, k_grid, tau, m_max, sigma,
    phi, master_seed.  k_grid accepts "lo:hi:step" or a comma list.
    """
    path = Path(path)
    raw: dict[str, str] = {}
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InvalidArgumentError(f"{path}:{lineno}: expected key=value")
        key, _, value = line.partition("=")
        raw[key.strip()] = value.strip()
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})
    return config_from_strings(raw)


def config_from_strings(raw: dict) -> ExperimentConfig:
    """Build a config from string-valued settings (file or CLI)."""
    kwargs = {}
    known = {
        "processes": lambda v: tuple(p.strip() for p in str(v).split(",") if p.strip()),
        "n": int,
        "replications": int,
        "k_grid": lambda v: _parse_k_grid(str(v)),
        "tau": float,
        "m_max": int,
        "sigma": float,
        "phi": float,
        "master_seed": int,
    }
    for key, value in raw.items():
        if key not in known:
            raise InvalidArgumentError(f"unknown config key {key!r}")
        try:
            kwargs[key] = known[key](value)
        except (TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"bad value for {key}: {value!r}") from exc
    return ExperimentConfig(**kwargs)
