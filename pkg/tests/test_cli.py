import io
import json

import pytest
from click.testing import CliRunner

from ffitts import Model, compare, embedded
from ffitts.cli import main, use_color


@pytest.fixture
def runner():
    return CliRunner()


class TestFit:
    def test_fit_reference_1d_all_models(self, runner):
        result = runner.invoke(main, [
            "fit", "--dataset", "paper-1d", "--models", "all",
            "--sigma-a", "calib-ra", "--no-cv",
        ])
        assert result.exit_code == 0
        assert "#1 Baseline" in result.output
        assert "132.7" in result.output          # intercept a
        assert "0.9811" in result.output         # baseline R^2
        assert "unusable: mathematical error in 2 condition(s)" in result.output
        assert "!err" in result.output           # adjusted-width matrix

    def test_fit_m7_with_literal_sigma(self, runner):
        result = runner.invoke(main, [
            "fit", "--dataset", "paper-2d", "--models", "m7",
            "--sigma-a", "1.163", "--no-cv",
        ])
        assert result.exit_code == 0
        assert "0.9355" in result.output

    def test_unknown_dataset_is_usage_error(self, runner):
        result = runner.invoke(main, ["fit", "--dataset", "paper-3d"])
        assert result.exit_code == 2
        assert "paper-1d" in result.output

    def test_unknown_model_is_usage_error(self, runner):
        result = runner.invoke(main, [
            "fit", "--dataset", "paper-1d", "--models", "m9",
        ])
        assert result.exit_code == 2

    def test_m7_without_sigma_is_usage_error(self, runner):
        result = runner.invoke(main, [
            "fit", "--dataset", "paper-2d", "--models", "m7",
        ])
        assert result.exit_code == 2
        assert "--sigma-a" in result.output

    def test_requires_exactly_one_input(self, runner):
        assert runner.invoke(main, ["fit"]).exit_code == 2
        result = runner.invoke(main, [
            "fit", "--dataset", "paper-1d", "--input", "x.csv",
        ])
        assert result.exit_code == 2

    def test_json_round_trips_fit_fields(self, runner):
        result = runner.invoke(main, [
            "fit", "--dataset", "paper-1d", "--models", "m1,m6",
            "--format", "json", "--no-cv",
        ])
        assert result.exit_code == 0
        doc = json.loads(result.output)
        report = compare(
            embedded("paper-1d"),
            [Model.M1_BASELINE, Model.M6_W_SQRT_C],
            cv=False,
        )
        by_model = {row["model"]: row for row in doc["models"]}
        for fitted in report.results:
            row = by_model[fitted.model.value]
            for field in ("r2", "adj_r2", "aic", "bic", "a_ms", "b_ms_per_bit",
                          "c_mm", "n", "k"):
                assert row[field] == getattr(fitted, field)
        assert doc["plots"]["intercept"]["points"]

    def test_csv_format(self, runner):
        result = runner.invoke(main, [
            "fit", "--dataset", "paper-1d", "--models", "m1",
            "--format", "csv", "--no-cv",
        ])
        assert result.exit_code == 0
        assert result.output.splitlines()[0].startswith("model,description")

    def test_out_writes_report_and_plot_files(self, runner, tmp_path):
        out = tmp_path / "report.md"
        result = runner.invoke(main, [
            "fit", "--dataset", "paper-2d", "--models", "m1",
            "--no-cv", "--out", str(out),
        ])
        assert result.exit_code == 0
        assert out.exists()
        assert (tmp_path / "report.fits.csv").exists()
        assert (tmp_path / "report.intercept.csv").exists()
        fits = (tmp_path / "report.fits.csv").read_text()
        assert fits.startswith("model,A_mm,W_mm,id_bits,mt_ms,predicted_mt_ms")

    def test_csv_out_includes_wf_matrix_file(self, runner, tmp_path):
        out = tmp_path / "report.csv"
        result = runner.invoke(main, [
            "fit", "--dataset", "paper-1d", "--models", "m1",
            "--no-cv", "--format", "csv", "--out", str(out),
        ])
        assert result.exit_code == 0
        wf = (tmp_path / "report.wf.csv").read_text()
        assert wf.startswith("method,sigma_a_mm,A_mm,W_mm,wf_mm")
        assert "!err" in wf

    def test_fit_from_aggregate_file(self, runner, tmp_path, paper_1d):
        from ffitts import write_aggregate_csv

        path = tmp_path / "agg.csv"
        write_aggregate_csv(paper_1d, path)
        result = runner.invoke(main, [
            "fit", "--input", str(path), "--models", "m1", "--no-cv",
        ])
        assert result.exit_code == 0
        assert "0.9811" in result.output


class TestSigma:
    def test_catalog_1d(self, runner):
        result = runner.invoke(main, ["sigma", "--dataset", "paper-1d"])
        assert result.exit_code == 0
        for value in ("0.884", "0.736", "0.977", "1.01"):
            assert value in result.output

    def test_catalog_2d(self, runner):
        result = runner.invoke(main, ["sigma", "--dataset", "paper-2d"])
        assert result.exit_code == 0
        for value in ("1.37", "1.16", "1.33", "1.27"):
            assert value in result.output

    def test_catalog_csv_format(self, runner):
        result = runner.invoke(main, [
            "sigma", "--dataset", "paper-1d", "--format", "csv",
        ])
        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert lines[0] == "method,label,sigma_a_mm,normality,note"
        assert len(lines) == 5

    def test_no_input_is_usage_error(self, runner):
        assert runner.invoke(main, ["sigma"]).exit_code == 2

    def test_empty_input_is_usage_error(self, runner, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("participant,block,trial,A_mm,W_mm,target_x_mm,"
                        "target_y_mm,touch_x_mm,touch_y_mm,mt_ms,tap_index,"
                        "is_practice\n")
        result = runner.invoke(main, ["sigma", "--input", str(path)])
        assert result.exit_code == 2

    def test_simulate_piped_to_intercept_sigma(self, runner):
        sim = runner.invoke(main, [
            "simulate", "--alpha", "0.0108", "--sigma-a", "1.153",
            "--widths", "2,4,6,8,10", "--amplitudes", "30",
            "--trials", "20000", "--seed", "7", "--dim", "1d",
        ])
        assert sim.exit_code == 0
        result = runner.invoke(main, [
            "sigma", "--input", "-", "--method", "intercept",
            "--dim", "1d", "--axis", "y", "--outlier-mm", "1000000",
            "--format", "json",
        ], input=sim.output)
        assert result.exit_code == 0
        doc = json.loads(result.output)
        (row,) = [r for r in doc["estimates"] if r["method"] == "intercept-fitts"]
        assert abs(row["sigma_a_mm"] - 1.153) / 1.153 < 0.05


class TestSimulate:
    def test_byte_identical_for_fixed_seed(self, runner, tmp_path):
        args = [
            "simulate", "--alpha", "0", "--sigma-a", "1.0",
            "--trials", "20", "--seed", "7",
        ]
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert runner.invoke(main, args + ["--out", str(a)]).exit_code == 0
        assert runner.invoke(main, args + ["--out", str(b)]).exit_code == 0
        assert a.read_bytes() == b.read_bytes()

    def test_default_seed_echoed_in_metadata(self, runner):
        result = runner.invoke(main, [
            "simulate", "--alpha", "0", "--sigma-a", "1.0", "--trials", "5",
        ])
        assert result.exit_code == 0
        assert "# seed=0" in result.output
        assert "# normal_algorithm=inverse-cdf(PCG64)" in result.output

    def test_stdout_matches_file_output(self, runner, tmp_path):
        args = [
            "simulate", "--alpha", "0.01", "--sigma-a", "0.5",
            "--trials", "10", "--seed", "11",
        ]
        piped = runner.invoke(main, args)
        out = tmp_path / "f.csv"
        assert runner.invoke(main, args + ["--out", str(out)]).exit_code == 0
        assert piped.output == out.read_text()

    def test_bad_width_list_is_usage_error(self, runner):
        result = runner.invoke(main, [
            "simulate", "--alpha", "0", "--sigma-a", "1",
            "--widths", "2,zebra",
        ])
        assert result.exit_code == 2


class TestDatasets:
    def test_lists_embedded(self, runner):
        result = runner.invoke(main, ["datasets"])
        assert result.exit_code == 0
        assert "paper-1d" in result.output
        assert "paper-2d" in result.output
        assert "Calib (R&A)" in result.output


class TestColor:
    def test_env_var_disables_color(self, monkeypatch):
        class Tty(io.StringIO):
            def isatty(self):
                return True

        monkeypatch.setenv("FFITTS_NO_COLOR", "1")
        assert use_color(Tty()) is False
        monkeypatch.delenv("FFITTS_NO_COLOR")
        assert use_color(Tty()) is True
        assert use_color(io.StringIO()) is False
