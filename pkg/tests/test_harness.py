import json

import numpy as np
import pytest

from longmem import ArfimaParams, ChainConfig, DomainError, InvalidInputError, simulate
from longmem.baselines import DiagnosticsReport
from longmem.harness import (
    EstimateReport,
    Scenario,
    StudySpec,
    default_scenarios,
    emit_report,
    estimate_ls,
    ingest_csv,
    replicate_seed,
    run_study,
    transform,
)
from longmem.harness.config import default_config_text, load_chain_config, load_study_spec
from longmem.harness.cli import main as cli_main
from longmem.harness.study import ReplicateRecord, ScenarioAggregate, StudyResult
from longmem.spectral import TimeSeries


class TestIngestCsv:
    def test_bundled_synthetic_fixture(self):
        from pathlib import Path

        path = Path(__file__).parent / "data" / "synthetic_arfima_d03.csv"
        series = ingest_csv(path, column="value")
        assert series.n == 512
        report = estimate_ls(series)
        assert -0.2 < report.d_point < 0.6  # wide sanity band for one short draw

    def test_headerless_single_column(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("1.0\n2.5\n-3\n4\n5\n")
        series = ingest_csv(path)
        np.testing.assert_allclose(series.values, [1.0, 2.5, -3.0, 4.0, 5.0])

    def test_named_column(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("year,level\n1,10\n2,11\n3,12\n4,13\n")
        series = ingest_csv(path, column="level")
        np.testing.assert_allclose(series.values, [10, 11, 12, 13])

    def test_missing_cell_names_row(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("1.0\n2.0\nNA\n4.0\n")
        with pytest.raises(InvalidInputError, match="row 3"):
            ingest_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            ingest_csv(tmp_path / "nope.csv")

    def test_unknown_column(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("a,b\n1,2\n3,4\n")
        with pytest.raises(InvalidInputError, match="no column"):
            ingest_csv(path, column="c")

    def test_index_column(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("t,v\n0,5\n1,6\n2,7\n3,8\n")
        series = ingest_csv(path, column=1)
        np.testing.assert_allclose(series.values, [5, 6, 7, 8])


class TestTransform:
    def test_log_returns(self):
        series = TimeSeries([1.0, np.e, np.e**2, np.e**3, np.e**4])
        out = transform(series, "log-returns")
        np.testing.assert_allclose(out.values, [1.0, 1.0, 1.0, 1.0], rtol=1e-14)

    def test_first_difference(self):
        series = TimeSeries([5.0, 3.0, 8.0, 8.0, 1.0])
        out = transform(series, "first-difference")
        np.testing.assert_allclose(out.values, [-2.0, 5.0, 0.0, -7.0])

    def test_constant_series_differences_to_zero(self):
        out = transform(TimeSeries(np.full(10, 4.2)), "first-difference")
        assert np.all(out.values == 0.0)

    def test_log_returns_need_positive(self):
        with pytest.raises(DomainError):
            transform(TimeSeries([1.0, -1.0, 2.0, 3.0, 4.0]), "log-returns")

    def test_none_passthrough(self):
        series = TimeSeries([1.0, 2.0, 3.0, 4.0])
        assert transform(series, "none") is series


class TestSeeds:
    def test_deterministic_and_distinct(self):
        seeds = {
            replicate_seed(1234, scen, rep)
            for scen in range(50)
            for rep in range(50)
        }
        assert len(seeds) == 2500
        assert replicate_seed(1234, 3, 7) == replicate_seed(1234, 3, 7)
        assert replicate_seed(1234, 3, 7) != replicate_seed(1235, 3, 7)


class TestScenarioGrid:
    def test_default_grid_is_the_full_design(self):
        scenarios = default_scenarios()
        assert len(scenarios) == 50
        d_values = sorted({s.d for s in scenarios})
        assert d_values == [0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.49]
        pairs = {(s.phi, s.theta) for s in scenarios}
        assert pairs == {(0.0, 0.0), (0.8, 0.1), (0.5, 0.1), (0.1, 0.5), (0.1, 0.8)}


class TestRunStudy:
    def _small_spec(self, **kw):
        defaults = dict(
            scenarios=(Scenario(d=0.3),),
            replicates=3,
            n=512,
            methods=("ls",),
            base_seed=42,
            chain=ChainConfig(iterations=50, burn_in=20, thin=1),
            workers=1,
        )
        defaults.update(kw)
        return StudySpec(**defaults)

    def test_ls_only_record_arithmetic(self):
        result = run_study(self._small_spec())
        assert len(result.records) == 3
        agg = result.aggregates[0]
        assert agg.n_replicates == 3
        assert agg.coverage in (0.0, 1 / 3, 2 / 3, 1.0)

    def test_identical_specs_identical_results(self):
        spec = self._small_spec()
        a = run_study(spec)
        b = run_study(spec)
        assert [r.d_point for r in a.records] == [r.d_point for r in b.records]

    def test_workers_do_not_change_results(self):
        spec1 = self._small_spec(replicates=4)
        spec2 = self._small_spec(replicates=4, workers=2)
        a = run_study(spec1)
        b = run_study(spec2)
        assert [r.d_point for r in a.records] == [r.d_point for r in b.records]

    def test_widened_intervals_cover_everything(self):
        result = run_study(self._small_spec(replicates=5))
        widened = [
            ReplicateRecord(
                scenario_index=r.scenario_index, replicate_index=r.replicate_index,
                method=r.method, seed=r.seed, d_true=r.d_true, d_point=r.d_point,
                d_low=-1.0, d_high=0.5, runtime_seconds=r.runtime_seconds,
            )
            for r in result.records
        ]
        assert all(r.covers for r in widened)


class TestEmitReport:
    def _estimate(self):
        return EstimateReport(
            method="ls", d_point=0.31234567, d_low=0.2812345, d_high=0.3434567,
            n=1000, m=251, K=1, ell=1, seed=7, runtime_seconds=0.125,
            extra={"c_hat": -1.23456789},
        )

    def test_json_round_trip_six_digits(self, tmp_path):
        path = tmp_path / "est.json"
        emit_report(self._estimate(), "json", path)
        payload = json.loads(path.read_text())
        assert payload["schema_version"] == "1"
        assert payload["method"] == "ls"
        assert payload["d_interval"][0] <= payload["d_point"] <= payload["d_interval"][1]
        assert payload["d_point"] == float("0.312346")  # 6 significant digits
        assert payload["extra"]["c_hat"] == float("-1.23457")

    def test_diagnostics_json(self, tmp_path):
        report = DiagnosticsReport(rs_hurst=0.52, corrected_rs_hurst=0.55,
                                   empirical_hurst=0.55, dfa2_slope=0.9)
        path = tmp_path / "diag.json"
        emit_report(report, "json", path)
        payload = json.loads(path.read_text())
        assert payload["method"] == "diagnostics"
        assert payload["dfa2_slope"] == 0.9

    def test_study_csv_header_fixed(self, tmp_path):
        spec = StudySpec(
            scenarios=(Scenario(d=0.3),), replicates=2, n=512, methods=("ls",),
            base_seed=1, chain=ChainConfig(iterations=40, burn_in=10, thin=1),
        )
        result = run_study(spec)
        path = tmp_path / "study.csv"
        emit_report(result, "csv", path)
        lines = path.read_text().splitlines()
        assert lines[0] == (
            "scenario_d,phi,theta,method,mean_estimate,ci_lo,ci_hi,coverage,n_replicates"
        )
        assert len(lines) == 2

    def test_estimate_csv_single_row(self, tmp_path):
        path = tmp_path / "est.csv"
        emit_report(self._estimate(), "csv", path)
        lines = path.read_text().splitlines()
        assert lines[0] == "method,d_point,ci_lo,ci_hi,n,m,K,ell,seed"
        assert len(lines) == 2
        assert lines[1].startswith("ls,0.312346,")

    def test_unknown_format(self, tmp_path):
        with pytest.raises(InvalidInputError):
            emit_report(self._estimate(), "yaml", tmp_path / "x.yaml")


class TestConfigFiles:
    def test_defaults_printable_and_parse_back(self, tmp_path):
        text = default_config_text()
        assert "[chain]" in text and "[study]" in text
        path = tmp_path / "cfg.ini"
        path.write_text(text)
        chain = load_chain_config(path)
        assert chain.iterations == 20_000
        assert chain.kernel_kind == "double-exponential"
        spec = load_study_spec(path, chain=chain)
        assert spec.replicates == 50
        assert len(spec.scenarios) == 50

    def test_custom_scenarios(self, tmp_path):
        path = tmp_path / "cfg.ini"
        path.write_text(
            "[chain]\niterations = 100\nburn_in = 50\nthin = 1\n\n"
            "[study]\nn = 512\nreplicates = 2\nmethods = ls\n"
            "scenarios = 0.3,0.0,0.0; 0.1,0.1,0.5\n"
        )
        spec = load_study_spec(path)
        assert spec.chain.iterations == 100
        assert spec.scenarios == (Scenario(0.3, 0.0, 0.0), Scenario(0.1, 0.1, 0.5))
        assert spec.methods == ("ls",)

    def test_bad_scenario_triple(self, tmp_path):
        path = tmp_path / "cfg.ini"
        path.write_text("[study]\nscenarios = 0.3,0.0\n")
        with pytest.raises(InvalidInputError):
            load_study_spec(path)


class TestCli:
    def test_simulate_estimate_diagnostics_pipeline(self, tmp_path, capsys):
        series_path = tmp_path / "series.csv"
        code = cli_main([
            "simulate", "--d", "0.3", "--n", "2048", "--seed", "5",
            "--out", str(series_path),
        ])
        assert code == 0
        assert series_path.exists()

        report_path = tmp_path / "est.json"
        code = cli_main([
            "estimate", "--method", "ls", "--input", str(series_path),
            "--out", str(report_path), "--format", "json",
        ])
        assert code == 0
        payload = json.loads(report_path.read_text())
        assert payload["method"] == "ls"
        assert -1.0 < payload["d_point"] < 0.5

        diag_path = tmp_path / "diag.json"
        code = cli_main([
            "diagnostics", "--input", str(series_path), "--out", str(diag_path),
        ])
        assert code == 0
        assert json.loads(diag_path.read_text())["method"] == "diagnostics"

    def test_periodogram_command(self, tmp_path):
        series_path = tmp_path / "series.csv"
        cli_main(["simulate", "--d", "0.0", "--n", "256", "--seed", "1",
                  "--out", str(series_path)])
        out_path = tmp_path / "pg.csv"
        code = cli_main(["periodogram", "--input", str(series_path),
                         "--out", str(out_path)])
        assert code == 0
        lines = out_path.read_text().splitlines()
        assert lines[0] == "frequency,ordinate"
        assert len(lines) == 1 + 128

    def test_invalid_input_exit_code(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("1\nx\n3\n4\n")
        code = cli_main(["estimate", "--method", "ls", "--input", str(bad)])
        assert code == 2

    def test_missing_file_exit_code(self, tmp_path):
        code = cli_main(["estimate", "--method", "ls",
                         "--input", str(tmp_path / "none.csv")])
        assert code == 4

    def test_print_config(self, capsys):
        code = cli_main(["study", "--print-config"])
        assert code == 0
        out = capsys.readouterr().out
        assert "[chain]" in out and "[study]" in out

    def test_study_command_deterministic_csv(self, tmp_path):
        cfg = tmp_path / "cfg.ini"
        cfg.write_text(
            "[chain]\niterations = 60\nburn_in = 20\nthin = 1\n\n"
            "[study]\nn = 512\nreplicates = 2\nmethods = ls\n"
            "scenarios = 0.3,0.0,0.0\n"
        )
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        assert cli_main(["study", "--config", str(cfg), "--out", str(out1),
                         "--format", "csv"]) == 0
        assert cli_main(["study", "--config", str(cfg), "--out", str(out2),
                         "--format", "csv"]) == 0
        assert out1.read_bytes() == out2.read_bytes()
