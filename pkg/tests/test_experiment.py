import math

import numpy as np
import pytest

from cluster_extremes import (
    ExperimentConfig,
    InvalidArgumentError,
    ProcessSpec,
    RatioTable,
    TimeSeries,
    derive_seed,
    emit_table,
    exact_ground_truth,
    full_report,
    load_config,
    make_layout,
    panjer_invert,
    run_experiment,
    simulate,
    count_exceedances,
    empirical_compound,
)
from cluster_extremes.experiment import (
    CSV_HEADER,
    CellStats,
    _evaluate_series,
    config_from_strings,
)

SMALL = ExperimentConfig(
    processes=("iid_gaussian", "max_ar1"),
    n=400,
    replications=6,
    k_grid=(20, 40),
    master_seed=777,
)


class TestConfig:
    def test_defaults_match_benchmark_protocol(self):
        cfg = ExperimentConfig()
        assert cfg.n == 2000
        assert cfg.replications == 500
        assert cfg.k_grid == tuple(range(50, 251, 10))
        assert cfg.tau == 1.0
        assert cfg.m_max == 8
        assert (cfg.sigma, cfg.phi) == (0.7, 1.3)

    def test_validation(self):
        with pytest.raises(InvalidArgumentError):
            ExperimentConfig(processes=("weibull",))
        with pytest.raises(InvalidArgumentError):
            ExperimentConfig(k_grid=(5000,))
        with pytest.raises(InvalidArgumentError):
            ExperimentConfig(sigma=1.3, phi=0.7)
        with pytest.raises(InvalidArgumentError):
            ExperimentConfig(replications=0)


class TestSingleReplication:
    def test_mean_and_rmse_from_one_ratio(self):
        cfg = ExperimentConfig(
            processes=("iid_gaussian",),
            n=400,
            replications=1,
            k_grid=(20,),
            master_seed=4242,
        )
        table = run_experiment(cfg)

        # recompute the single replication by hand
        seed = derive_seed(4242, 0, 0)
        series = simulate(ProcessSpec(kind="iid_gaussian", n=400, seed=seed))
        layout = make_layout(400, 20)
        pmf = empirical_compound(count_exceedances(series, layout, 1.0), 20)
        rho = panjer_invert(pmf, 8).prob(1) / 1.0

        cell = table.cells[("iid_gaussian", "pi_tau", "pi1", 20)]
        assert cell.mean_ratio == rho
        assert cell.rmse_ratio == pytest.approx(abs(rho - 1.0), rel=1e-15)
        assert cell.failures == 0

    def test_theta_ratio_single(self):
        cfg = ExperimentConfig(
            processes=("max_ar1",), n=400, replications=1, k_grid=(20,), master_seed=7
        )
        table = run_experiment(cfg)
        seed = derive_seed(7, 0, 0)
        series = simulate(ProcessSpec(kind="max_ar1", n=400, seed=seed))
        report = full_report(series, 20, 1.0, 8)
        cell = table.cells[("max_ar1", "theta1", "theta", 20)]
        assert cell.mean_ratio == report.theta1 / 0.5


class TestDeterminism:
    def test_workers_do_not_change_bytes(self, tmp_path):
        paths = []
        for workers in (1, 2):
            table = run_experiment(SMALL, workers=workers)
            path = tmp_path / f"w{workers}.csv"
            emit_table(table, path)
            paths.append(path.read_bytes())
        assert paths[0] == paths[1]

    def test_rerun_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_table(run_experiment(SMALL), a)
        emit_table(run_experiment(SMALL), b)
        assert a.read_bytes() == b.read_bytes()


class TestAggregates:
    def test_variance_decomposition_every_cell(self):
        table = run_experiment(SMALL)
        for _, _, _, _, stats in table.rows():
            if stats.mean_ratio is None:
                continue
            assert stats.rmse_ratio**2 + 1e-12 >= (stats.mean_ratio - 1.0) ** 2

    def test_iid_failures_are_rare(self):
        cfg = ExperimentConfig(
            processes=("iid_gaussian",),
            n=2000,
            replications=50,
            k_grid=(50, 250),
            master_seed=99,
        )
        table = run_experiment(cfg)
        for _, estimator, _, _, stats in table.rows():
            assert stats.failures <= 1  # at most 1 of 50 replications

    def test_iid_theta1_ratio_near_one(self):
        cfg = ExperimentConfig(
            processes=("iid_gaussian",),
            n=2000,
            replications=60,
            k_grid=(100,),
            master_seed=5,
        )
        table = run_experiment(cfg)
        cell = table.cells[("iid_gaussian", "theta1", "theta", 100)]
        assert 0.9 <= cell.mean_ratio <= 1.1

    def test_iid_only_pi1_quantities(self):
        table = run_experiment(
            ExperimentConfig(
                processes=("iid_gaussian",), n=400, replications=2, k_grid=(20,)
            )
        )
        quantities = {q for _, e, q, _, _ in table.rows() if e == "pi_tau"}
        assert quantities == {"pi1"}


class TestFailureAccounting:
    def test_constant_series_fails_everything(self):
        series = TimeSeries(np.full(400, 1.0))
        results = _evaluate_series(series, 20, 1.0, 8, 0.7, 1.3)
        codes = {v for v in results.values() if isinstance(v, str)}
        assert codes == {"degenerate-compound", "no-clusters"}
        assert not any(isinstance(v, float) for v in results.values())

    def test_runs_window_too_short_counts_as_failure(self):
        # blocks of length 4: no room for the run window
        series = simulate(ProcessSpec(kind="iid_gaussian", n=400, seed=1))
        results = _evaluate_series(series, 100, 1.0, 8, 0.7, 1.3)
        assert results[("theta_runs", "theta")] == "invalid-argument"
        assert isinstance(results[("theta1", "theta")], float)


class TestCsv:
    def test_header_only_for_empty_table(self, tmp_path):
        table = RatioTable(config=SMALL)
        path = tmp_path / "empty.csv"
        emit_table(table, path)
        assert path.read_text() == CSV_HEADER + "\n"

    def test_single_cell(self, tmp_path):
        table = RatioTable(config=SMALL)
        table.cells[("iid_gaussian", "theta1", "theta", 20)] = CellStats(
            mean_ratio=1.25, rmse_ratio=0.25, failures=0
        )
        path = tmp_path / "one.csv"
        emit_table(table, path)
        lines = path.read_text().splitlines()
        assert lines == [CSV_HEADER, "iid_gaussian,theta1,theta,20,1.25,0.25,0"]

    def test_column_count_constant_and_order(self, tmp_path):
        table = run_experiment(SMALL)
        path = tmp_path / "small.csv"
        emit_table(table, path)
        lines = path.read_text().splitlines()
        assert lines[0] == CSV_HEADER
        assert all(line.count(",") == 6 for line in lines)
        # processes appear in config order, k ascending within a block
        first = lines[1].split(",")
        assert first[0] == "iid_gaussian"
        assert first[3] == "20"

    def test_row_count_full_grid(self, tmp_path):
        # 2 processes: iid has 1 pi quantity, max_ar1 has 5; 3 pi estimators,
        # 6 theta estimators, 2 k values
        table = run_experiment(SMALL)
        rows = list(table.rows())
        expected = (3 * 1 + 6) * 2 + (3 * 5 + 6) * 2
        assert len(rows) == expected


class TestConfigFile:
    def test_parse_and_overrides(self, tmp_path):
        path = tmp_path / "study.cfg"
        path.write_text(
            "# benchmark setup\n"
            "processes = max_ar1, iid_gaussian\n"
            "n = 500\n"
            "replications = 3\n"
            "k_grid = 20:40:20\n"
            "tau = 1.0\n"
            "m_max = 6\n"
            "sigma = 0.7\n"
            "phi = 1.3\n"
            "master_seed = 11\n"
        )
        cfg = load_config(path)
        assert cfg.processes == ("max_ar1", "iid_gaussian")
        assert cfg.k_grid == (20, 40)
        assert cfg.m_max == 6
        over = load_config(path, {"replications": "5", "master_seed": None})
        assert over.replications == 5
        assert over.master_seed == 11

    def test_comma_grid(self):
        cfg = config_from_strings({"k_grid": "25,50", "n": "500"})
        assert cfg.k_grid == (25, 50)

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("blocks = 10\n")
        with pytest.raises(InvalidArgumentError):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InvalidArgumentError):
            load_config(tmp_path / "nope.cfg")

    def test_bad_line(self, tmp_path):
        path = tmp_path / "bad2.cfg"
        path.write_text("just words\n")
        with pytest.raises(InvalidArgumentError):
            load_config(path)
