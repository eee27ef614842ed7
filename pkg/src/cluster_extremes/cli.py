"""Command-line front end: simulate, estimate, experiment.

simulate    writes a series in the one-number-per-line text format, with a
            '#' header recording kind, params and seed.
estimate    reads a series file and prints one JSON document with the
            compound pmf, the cluster-size estimate, the extremal index
            report, optional smoothed versions and optional comparators.
            Degenerate data yields structured error entries, not a crash.
experiment  runs the Monte Carlo benchmark and writes the ratio CSV.

Exit codes: 0 on success (including partial estimation results), 2 on usage
or I/O errors.  The environment variable CLUSTER_EXTREMES_SEED supplies the
simulate seed when --seed is not given (flag > env > default).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .comparators import (
    RUNS_WINDOW_POLICY,
    TwoScaleSpec,
    blocks_theta,
    hsing_pi,
    runs_theta,
    two_scale_threshold,
)
from .compound import compound_profile, empirical_compound
from .errors import ClusterExtremesError, InvalidArgumentError
from .extremal import report_from_pmf
from .panjer import panjer_invert, smoothed_from_profile
from .series import count_exceedances, make_layout, read_series, write_series
from .simulators import PROCESS_KINDS, ProcessSpec, simulate
from . import experiment as exp

DEFAULT_SEED = 0
SEED_ENV_VAR = "CLUSTER_EXTREMES_SEED"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cluster-extremes",
        description="Cluster-size and extremal index estimation from block exceedances.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate a benchmark series")
    sim.add_argument("--kind", required=True, choices=PROCESS_KINDS)
    sim.add_argument("--n", type=int, default=2000)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--out", required=True)
    sim.add_argument("--eta", type=float, default=None, help="squared_arch1 scale")
    sim.add_argument("--lam", type=float, default=None, help="squared_arch1 feedback")
    sim.add_argument("--theta", type=float, default=None, help="max_ar1 extremal index")
    sim.add_argument("--r", type=int, default=None, help="ar1_uniform divisor")
    sim.add_argument("--burn-in", type=int, default=1000)

    est = sub.add_parser("estimate", help="estimate from a series file")
    est.add_argument("series", help="text file, one observation per line")
    est.add_argument("--blocks", type=int, required=True, help="number of blocks k")
    est.add_argument("--tau", type=float, default=1.0)
    est.add_argument("--m-max", type=int, default=8)
    est.add_argument("--sigma", type=float, default=None)
    est.add_argument("--phi", type=float, default=None)
    est.add_argument(
        "--comparators", action="store_true", help="also run blocks/runs comparators"
    )

    xp = sub.add_parser("experiment", help="run the Monte Carlo benchmark")
    xp.add_argument("--config", default=None, help="key=value config file")
    xp.add_argument("--out", required=True, help="CSV output path")
    xp.add_argument("--workers", type=int, default=1)
    xp.add_argument("--processes", default=None)
    xp.add_argument("--n", type=int, default=None)
    xp.add_argument("--replications", type=int, default=None)
    xp.add_argument("--k-grid", default=None, help='"lo:hi:step" or comma list')
    xp.add_argument("--tau", type=float, default=None)
    xp.add_argument("--m-max", type=int, default=None)
    xp.add_argument("--sigma", type=float, default=None)
    xp.add_argument("--phi", type=float, default=None)
    xp.add_argument("--master-seed", type=int, default=None)
    return parser


def _resolve_seed(flag_value: int | None) -> int:
    if flag_value is not None:
        return flag_value
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise InvalidArgumentError(
                f"{SEED_ENV_VAR} must be an integer, got {env!r}"
            ) from None
    return DEFAULT_SEED


def _cmd_simulate(args) -> int:
    params = {}
    for name in ("eta", "lam", "theta", "r"):
        value = getattr(args, name)
        if value is not None:
            params[name] = value
    spec = ProcessSpec(
        kind=args.kind,
        n=args.n,
        seed=_resolve_seed(args.seed),
        params=params,
        burn_in=args.burn_in,
    )
    series = simulate(spec)
    header = " ".join(f"{k}={v}" for k, v in series.meta.items())
    write_series(series, args.out, header=header)
    return 0


def _cmd_estimate(args) -> int:
    if (args.sigma is None) != (args.phi is None):
        raise InvalidArgumentError("--sigma and --phi must be given together")
    series = read_series(args.series)
    layout = make_layout(series.n, args.blocks)

    doc: dict = {
        "input": args.series,
        "n": series.n,
        "blocks": args.blocks,
        "block_length": layout.block_length,
        "tau": args.tau,
        "m_max": args.m_max,
        "errors": [],
    }

    def record(name: str, exc: ClusterExtremesError):
        doc["errors"].append({"estimator": name, "error": exc.code})

    counts = count_exceedances(series, layout, args.tau)
    doc["threshold"] = counts.threshold_used
    pmf = empirical_compound(counts, args.blocks)
    doc["compound"] = pmf.to_json_dict()

    try:
        doc["cluster_sizes"] = panjer_invert(pmf, args.m_max).to_json_dict()
    except ClusterExtremesError as exc:
        doc["cluster_sizes"] = None
        record("cluster_sizes", exc)

    report = report_from_pmf(pmf, args.m_max)
    doc["report"] = report.to_json_dict()

    if args.sigma is not None:
        try:
            profile = compound_profile(series, args.blocks, args.sigma, args.phi)
            smoothed = smoothed_from_profile(profile, args.m_max)
            doc["smoothed"] = {
                "sigma": args.sigma,
                "phi": args.phi,
                "cluster_sizes": smoothed.cluster_pmf.to_json_dict(),
                "theta1": smoothed.theta1,
                "piece_count": smoothed.piece_count,
                "degenerate_pieces": smoothed.degenerate_count,
                "excluded_length": smoothed.excluded_length,
            }
        except ClusterExtremesError as exc:
            doc["smoothed"] = None
            record("smoothed", exc)

    if args.comparators:
        doc["comparators"] = _comparator_docs(series, args.blocks, args.tau, record)

    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _comparator_docs(series, blocks, tau, record) -> list[dict]:
    docs: list[dict] = []
    try:
        two_scale = TwoScaleSpec.for_study(series.n, blocks)
    except ClusterExtremesError as exc:
        record("comparators", exc)
        return docs
    try:
        pmf = hsing_pi(series, blocks, tau, two_scale, max_size=8)
        docs.append({"estimator": "pi_hsing", **pmf.to_json_dict()})
    except ClusterExtremesError as exc:
        record("pi_hsing", exc)
    try:
        docs.append(
            {
                "estimator": "theta_blocks",
                "theta": blocks_theta(series, blocks, tau, two_scale),
                "tau": tau,
            }
        )
    except ClusterExtremesError as exc:
        record("theta_blocks", exc)
    try:
        u = two_scale_threshold(series, tau, two_scale)
        docs.append(
            {
                "estimator": "theta_runs",
                "theta": runs_theta(series, u, two_scale.run_length),
                "tau": tau,
                "run_length": two_scale.run_length,
                "window_policy": RUNS_WINDOW_POLICY,
            }
        )
    except ClusterExtremesError as exc:
        record("theta_runs", exc)
    return docs


def _cmd_experiment(args) -> int:
    overrides = {
        "processes": args.processes,
        "n": args.n,
        "replications": args.replications,
        "k_grid": args.k_grid,
        "tau": args.tau,
        "m_max": args.m_max,
        "sigma": args.sigma,
        "phi": args.phi,
        "master_seed": args.master_seed,
    }
    if args.config is not None:
        config = exp.load_config(args.config, overrides)
    else:
        config = exp.config_from_strings(
            {k: v for k, v in overrides.items() if v is not None}
        )
    table = exp.run_experiment(config, workers=args.workers)
    exp.emit_table(table, args.out)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "simulate": _cmd_simulate,
        "estimate": _cmd_estimate,
        "experiment": _cmd_experiment,
    }
    try:
        return handlers[args.command](args)
    except (ClusterExtremesError, OSError) as exc:
        print(f"cluster-extremes: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
