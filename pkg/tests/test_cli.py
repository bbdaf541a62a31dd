import csv
import io
import json
import math

import pytest
from click.testing import CliRunner

from informed_ttest import (
    DEFAULT_CAUCHY_PRIOR,
    Orientation,
    StudentTPrior,
    TTestSummary,
    bf10,
    fit_t_to_quantiles,
    one_sided_bf,
    observed_effect_size,
)
from informed_ttest.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def run_json(runner, args):
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    return json.loads(result.output)


class TestAnalyze:
    def test_crowd_within_original(self, runner):
        report = run_json(runner, ["analyze", "--t", "6.22", "--n1", "173"])
        assert abs(report["bf10"]["bf"] / 2483125.0 - 1.0) <= 0.01
        # identical to the direct library call (shared code path)
        direct = bf10(TTestSummary.one_sample(6.22, 173), DEFAULT_CAUCHY_PRIOR)
        assert report["bf10"]["log_bf"] == direct.log_bf10
        assert report["schema_version"] == 1

    def test_symmetric_null_case(self, runner):
        report = run_json(
            runner, ["analyze", "--t", "0", "--n1", "30", "--direction", "pos"]
        )
        assert abs(report["posterior"]["median"]) <= 1e-6
        assert report["one_sided"]["log_bf"] == pytest.approx(
            report["bf10"]["log_bf"], abs=1e-8
        )

    def test_replication_compare_default(self, runner):
        report = run_json(
            runner,
            ["analyze", "--t", "4.02", "--n1", "140",
             "--prior", "t:0.465,0.078,41.478", "--compare-default"],
        )
        assert abs(report["bf10"]["bf"] / 901.5 - 1.0) <= 0.01
        cmp = report["default_comparison"]
        assert abs(cmp["bf10"]["bf"] / 170.2 - 1.0) <= 0.01
        assert abs(cmp["informed_vs_default"]["bf"] / 5.3 - 1.0) <= 0.02

    def test_grid_arrays(self, runner):
        report = run_json(
            runner, ["analyze", "--t", "2.0", "--n1", "25", "--grid"]
        )
        grid = report["grid"]
        assert len(grid["delta"]) == len(grid["posterior_density"]) == len(grid["prior_density"])
        assert all(b > a for a, b in zip(grid["delta"], grid["delta"][1:]))

    def test_two_sample(self, runner):
        report = run_json(
            runner,
            ["analyze", "--design", "two", "--t", "2.0", "--n1", "24", "--n2", "26",
             "--prior", "normal:0.35,0.04"],
        )
        direct = bf10(
            TTestSummary.two_sample(2.0, 24, 26),
            __import__("informed_ttest").NormalPrior(0.35, 0.04),
        )
        assert report["bf10"]["log_bf"] == direct.log_bf10

    def test_schema_violations_exit_2(self, runner):
        assert runner.invoke(main, ["analyze", "--t", "2", "--n1", "1"]).exit_code == 2
        assert runner.invoke(
            main, ["analyze", "--t", "2", "--n1", "10", "--prior", "t:1,2"]
        ).exit_code == 2
        assert runner.invoke(
            main, ["analyze", "--t", "2", "--n1", "10", "--n2", "12"]
        ).exit_code == 2


def write_csv(tmp_path, rows, header="study_id,design,t,n1,n2,side"):
    path = tmp_path / "batch.csv"
    path.write_text("\n".join([header] + rows) + "\n" if rows or header else "")
    return str(path)


class TestBatch:
    def test_three_rows_against_library(self, runner, tmp_path):
        rows = [f"s{i},two,{t},40,40,pos" for i, t in enumerate((2.0, 3.5, 5.0))]
        path = write_csv(tmp_path, rows)
        result = runner.invoke(
            main, ["batch", path, "--prior", "t:0.350,0.102,3", "--compare-default"]
        )
        assert result.exit_code == 0, result.output
        parsed = list(csv.DictReader(io.StringIO(result.output)))
        assert [r["study_id"] for r in parsed] == ["s0", "s1", "s2"]
        informed = StudentTPrior(0.350, 0.102, 3.0)
        for row, t in zip(parsed, (2.0, 3.5, 5.0)):
            s = TTestSummary.two_sample(t, 40, 40)
            want = one_sided_bf(s, informed, Orientation.POSITIVE_VS_NULL).log_bf10
            assert float(row["log_bf10"]) == pytest.approx(want, rel=1e-12)
            want_d = one_sided_bf(s, DEFAULT_CAUCHY_PRIOR, Orientation.POSITIVE_VS_NULL).log_bf10
            assert float(row["log_bf10_default"]) == pytest.approx(want_d, rel=1e-12)
            assert float(row["d_obs"]) == pytest.approx(observed_effect_size(s), rel=1e-12)

    def test_output_independent_of_parallelism(self, runner, tmp_path):
        rows = [f"s{i},one,{1.0 + 0.3 * i},{20 + i},," for i in range(8)]
        path = write_csv(tmp_path, rows)
        args = ["batch", path, "--prior", "t:0.2,0.5,3"]
        serial = runner.invoke(main, args + ["--jobs", "1"])
        parallel = runner.invoke(main, args + ["--jobs", "8"])
        assert serial.exit_code == parallel.exit_code == 0
        assert serial.output == parallel.output

    def test_empty_file_exit_2(self, runner, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        assert runner.invoke(main, ["batch", str(path), "--prior", "t:0,1,1"]).exit_code == 2
        path.write_text("study_id,design,t,n1,n2,side\n")
        assert runner.invoke(main, ["batch", str(path), "--prior", "t:0,1,1"]).exit_code == 2

    def test_bad_rows_go_to_sidecar(self, runner, tmp_path):
        rows = [
            "good,one,2.0,30,,",
            "toosmall,one,2.0,1,,",
            "badt,one,abc,30,,",
        ]
        path = write_csv(tmp_path, rows)
        out = str(tmp_path / "out.csv")
        result = runner.invoke(
            main, ["batch", path, "--prior", "t:0,0.7071067811865476,1", "--out", out]
        )
        assert result.exit_code == 0, result.output
        produced = list(csv.DictReader(open(out)))
        assert [r["study_id"] for r in produced] == ["good"]
        sidecar = list(csv.DictReader(open(out + ".errors.csv")))
        assert len(sidecar) == 2
        assert "observation" in sidecar[0]["error"]
        assert sidecar[1]["study_id"] == "badt"

    def test_all_rows_bad_exit_2(self, runner, tmp_path):
        path = write_csv(tmp_path, ["only,one,2.0,1,,"])
        out = str(tmp_path / "out.csv")
        result = runner.invoke(main, ["batch", path, "--prior", "t:0,1,1", "--out", out])
        assert result.exit_code == 2


class TestCurve:
    def test_identical_priors_no_crossover(self, runner):
        result = runner.invoke(
            main, ["curve", "--prior-a", "t:0,1,1", "--prior-b", "t:0,1,1", "--n-max", "6"]
        )
        assert result.exit_code == 0
        assert "no crossover" in result.output

    def test_small_n_default_stronger(self, runner):
        result = runner.invoke(main, ["curve", "--n-max", "5"])
        assert result.exit_code == 0
        csv_lines = [ln for ln in result.output.splitlines() if ln and ln[0].isdigit()]
        rows = list(csv.DictReader(io.StringIO("\n".join(["n,bf01_a,bf01_b"] + csv_lines))))
        assert len(rows) == 4  # n = 2..5
        for row in rows:
            assert float(row["bf01_b"]) > float(row["bf01_a"])

    def test_n_max_validation(self, runner):
        assert runner.invoke(main, ["curve", "--n-max", "1"]).exit_code == 2


class TestFit:
    def test_quantiles(self, runner):
        report = run_json(runner, ["fit", "--quantiles", "0.25,0.35,0.45", "--df", "3"])
        direct = fit_t_to_quantiles(0.25, 0.35, 0.45, 3.0)
        assert report["prior"]["location"] == 0.35
        assert report["prior"]["scale"] == direct.prior.scale
        assert report["percentile_feedback"]["p50"] == 0.35

    def test_histogram_file(self, runner, tmp_path):
        sheet = {
            "bin_edges": [0.0, 0.2, 0.4, 0.6, 0.8],
            "chip_counts": [2, 9, 6, 1],
        }
        path = tmp_path / "sheet.json"
        path.write_text(json.dumps(sheet))
        report = run_json(runner, ["fit", "--histogram", str(path)])
        assert 0.0 < report["prior"]["location"] < 0.8
        assert report["converged"] is True

    def test_mode_exclusivity(self, runner, tmp_path):
        assert runner.invoke(main, ["fit"]).exit_code == 2
        path = tmp_path / "sheet.json"
        path.write_text(json.dumps({"bin_edges": [0, 1], "chip_counts": [3]}))
        assert runner.invoke(
            main, ["fit", "--histogram", str(path), "--quantiles", "0.1,0.2,0.3"]
        ).exit_code == 2

    def test_insufficient_bins_exit_2(self, runner, tmp_path):
        path = tmp_path / "sheet.json"
        path.write_text(json.dumps({"bin_edges": [0.0, 0.5, 1.0], "chip_counts": [10, 0]}))
        assert runner.invoke(main, ["fit", "--histogram", str(path)]).exit_code == 2
