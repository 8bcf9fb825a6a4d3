"""Tests for the command-line interface."""

import json

from metricmanova.cli import demo_correlation_table, main


def run_cli(args):
    return main(args)


class TestPowerCommand:
    def test_csv_output_and_determinism(self, tmp_path):
        out1 = tmp_path / "p1.csv"
        out2 = tmp_path / "p2.csv"
        args = [
            "power", "--scenario", "1", "--study", "1", "--grid", "2",
            "--nsims", "3", "--B", "5", "--tests", "Pillai_d,Pillai",
            "--seed", "7", "--format", "csv",
        ]
        assert run_cli(args + ["--out", str(out1)]) == 0
        assert run_cli(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        text = out1.read_text()
        assert "# seed=7" in text
        data_lines = [l for l in text.splitlines() if l and not l.startswith("#")]
        assert data_lines[0] == "test,parameter,rate,mc_se,nsims"
        assert len(data_lines) == 1 + 2 * 2  # header + tests x grid points

    def test_json_output(self, tmp_path):
        out = tmp_path / "p.json"
        code = run_cli([
            "power", "--scenario", "1", "--study", "2", "--grid", "2",
            "--nsims", "2", "--B", "4", "--tests", "Pillai",
            "--seed", "3", "--format", "json", "--out", str(out),
        ])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["config"]["seed"] == 3
        assert len(payload["estimates"]) == 2
        assert all(0.0 <= e["rate"] <= 1.0 for e in payload["estimates"])

    def test_scenario2_sweep(self, tmp_path):
        out = tmp_path / "p2.csv"
        code = run_cli([
            "power", "--scenario", "2", "--study", "3", "--grid", "2",
            "--nsims", "2", "--B", "4", "--tests", "R_LERM,Pillai_d",
            "--n1", "6", "--n2", "6", "--nodes", "6",
            "--seed", "13", "--format", "csv", "--out", str(out),
        ])
        assert code == 0
        data_lines = [
            l for l in out.read_text().splitlines() if l and not l.startswith("#")
        ]
        assert len(data_lines) == 1 + 2 * 2


class TestSimulateAndTest:
    def test_simulate_then_test_roundtrip(self, tmp_path):
        data = tmp_path / "d.msd"
        assert run_cli([
            "simulate", "--scenario", "1", "--study", "1", "--effect", "0.8",
            "--n1", "25", "--n2", "25", "--seed", "11", "--out", str(data),
        ]) == 0
        out1 = tmp_path / "r1.json"
        out2 = tmp_path / "r2.json"
        targs = [
            "test", "--input", str(data), "--tests", "R_Euc,Pillai_d",
            "--alpha", "0.05", "--B", "20", "--seed", "2", "--format", "json",
        ]
        assert run_cli(targs + ["--out", str(out1)]) == 0
        assert run_cli(targs + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        payload = json.loads(out1.read_text())
        assert {r["test_name"] for r in payload["reports"]} == {"R_Euc", "Pillai_d"}
        assert payload["config"]["B"] == 20
        for report in payload["reports"]:
            for comp in report["components"]:
                if comp["p_value"] is not None:
                    assert 0.0 < comp["p_value"] <= 1.0

    def test_csv_reports(self, tmp_path):
        data = tmp_path / "d.msd"
        run_cli([
            "simulate", "--scenario", "2", "--study", "1", "--n1", "6",
            "--n2", "6", "--seed", "4", "--out", str(data),
        ])
        out = tmp_path / "r.csv"
        assert run_cli([
            "test", "--input", str(data), "--tests", "T_FA", "--seed", "1",
            "--B", "4", "--format", "csv", "--out", str(out),
        ]) == 0
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert lines[0].startswith("test,component,")
        assert len(lines) == 4  # header + T_1, T_2, T_1_2


class TestDemoCorrelation:
    def test_linear_scenario_signs(self):
        rows = demo_correlation_table(seed=5, n=400)
        assert len(rows) == 5
        linear = rows[0]
        assert linear["shape"] == "linear"
        assert linear["noncentered"] > 0.9
        assert linear["centered"] > 0.9
        negative = rows[1]
        assert negative["noncentered"] > 0.9  # both deviate from center together
        assert negative["centered"] > 0.9
        independent = rows[4]
        assert abs(independent["centered"]) < 0.2

    def test_cli_json(self, tmp_path):
        out = tmp_path / "demo.json"
        assert run_cli([
            "demo-correlation", "--seed", "9", "--n", "100",
            "--format", "json", "--out", str(out),
        ]) == 0
        payload = json.loads(out.read_text())
        assert len(payload["correlations"]) == 5


class TestExitCodes:
    def test_usage_error_unknown_test(self, tmp_path, capsys):
        code = run_cli(["test", "--input", "x.msd", "--tests", "bogus", "--seed", "1"])
        assert code == 1

    def test_usage_error_missing_argument(self):
        assert run_cli(["power", "--scenario", "1"]) == 1

    def test_missing_input_file(self, tmp_path):
        assert run_cli([
            "test", "--input", str(tmp_path / "absent.msd"), "--seed", "1",
        ]) == 2

    def test_malformed_file(self, tmp_path):
        bad = tmp_path / "bad.msd"
        bad.write_text("not a dataset\n")
        assert run_cli(["test", "--input", str(bad), "--seed", "1"]) == 2

    def test_numerical_degeneracy(self, tmp_path):
        # a space whose observations are all identical within each group makes
        # the moment variances vanish: T_FA reports degeneracy
        lines = ["msd 1", "observations 4", "spaces 1", "labels 1 1 2 2",
                 "space X gaussian"]
        lines += ["0.0 1.0", "0.0 1.0", "3.0 1.0", "3.0 1.0"]
        bad = tmp_path / "degenerate.msd"
        bad.write_text("\n".join(lines) + "\n")
        assert run_cli([
            "test", "--input", str(bad), "--tests", "T_FA", "--seed", "1",
        ]) == 3

    def test_invalid_alpha_is_data_error(self, tmp_path):
        data = tmp_path / "d.msd"
        run_cli([
            "simulate", "--scenario", "1", "--study", "1", "--n1", "5",
            "--n2", "5", "--seed", "2", "--out", str(data),
        ])
        assert run_cli([
            "test", "--input", str(data), "--alpha", "2.0", "--seed", "1",
        ]) == 2
