"""Command-line surface: outputs, manifests, and the error contract.

Every command must write manifest.json before its results, print errors
as a single JSON line on stderr with exit code 2, and produce delimited
output that is byte-identical when re-run with the same seed.
"""

import json

import pytest

from swapgrid import (
    Configuration,
    SearchSpec,
    __version__,
    baseline_params,
    baseline_profile,
    optimize_centralized,
    run_configuration,
)
from swapgrid.cli import main


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def read_error(err: str) -> dict:
    lines = [ln for ln in err.strip().splitlines() if ln]
    assert len(lines) == 1, f"expected one JSON error line, got {err!r}"
    payload = json.loads(lines[0])
    assert set(payload) == {"error", "message"}
    return payload


class TestEta:
    def test_stdout_table(self, capsys):
        code, out, err = run_cli(["eta"], capsys)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "period,eta"
        assert len(lines) == 25
        assert lines[1] == "0,0.21169757843017578"
        for line in lines[1:]:
            _, eta = line.split(",")
            assert 0.0 < float(eta) < 1.0

    def test_file_mode_writes_manifest_first(self, tmp_path, capsys):
        out_dir = tmp_path / "eta_run"
        code, _, _ = run_cli(["eta", "--out", str(out_dir)], capsys)
        assert code == 0
        assert (out_dir / "eta.csv").exists()
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["command"] == "eta"
        assert manifest["version"] == __version__


class TestOptimize:
    def test_matches_library_solution(self, tmp_path, capsys):
        out_dir = tmp_path / "opt"
        code, _, _ = run_cli(["optimize", "--out", str(out_dir)], capsys)
        assert code == 0
        header, row = (out_dir / "solution.csv").read_text().strip().splitlines()
        cells = dict(zip(header.split(","), row.split(",")))
        assert cells["configuration"] == "centralized"
        reference = optimize_centralized(baseline_params(),
                                         baseline_profile(),
                                         market=None, spec=SearchSpec())
        assert float(cells["rho_c"]) == reference.decision.rho_c
        assert float(cells["cost_density"]) == reference.breakdown.total
        assert float(cells["regulation_income"]) == 0.0

    def test_manifest_contents(self, tmp_path, capsys):
        out_dir = tmp_path / "opt"
        argv = ["optimize", "--out", str(out_dir), "--seed", "7"]
        code, _, _ = run_cli(argv, capsys)
        assert code == 0
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert set(manifest) == {"command", "argv", "inputs", "seed",
                                 "out_dir", "version", "params_fingerprint"}
        assert manifest["command"] == "optimize"
        assert manifest["argv"] == argv
        assert manifest["seed"] == 7
        assert manifest["inputs"]["config"] == "bundled:baseline.ini"
        # a regulation-off optimize never touches the market files
        assert "agc" not in manifest["inputs"]
        assert len(manifest["params_fingerprint"]) == 64

    def test_one_market_file_is_an_error(self, tmp_path, capsys):
        agc = tmp_path / "agc.csv"
        agc.write_text("timestamp,signal\n0.0,0.1\n2.0,0.2\n")
        code, _, err = run_cli(
            ["optimize", "--out", str(tmp_path / "x"), "--regulation",
             "--agc", str(agc)], capsys)
        assert code == 2
        payload = read_error(err)
        assert payload["error"] == "missing-input"
        assert "--prices" in payload["message"]

    def test_missing_config_file(self, tmp_path, capsys):
        code, _, err = run_cli(
            ["optimize", "--out", str(tmp_path / "x"),
             "--config", str(tmp_path / "no_such.ini")], capsys)
        assert code == 2
        assert read_error(err)["error"] == "missing-file"


class TestSweep:
    def test_row_count_and_figures(self, tmp_path, capsys):
        out_dir = tmp_path / "sweep"
        code, _, _ = run_cli(
            ["sweep", "--out", str(out_dir), "--axis", "demand",
             "--points", "1,2", "--configs", "centralized,decentralized",
             "--mc-samples", "100000"], capsys)
        assert code == 0
        lines = (out_dir / "sweep.csv").read_text().strip().splitlines()
        # 2 points x 2 configurations x 3 metrics, plus the header
        assert len(lines) == 13
        for metric in ("cost_density", "battery_density", "avg_reg_capacity"):
            assert (out_dir / f"sweep_{metric}.svg").exists()

    def test_unknown_configuration_label(self, tmp_path, capsys):
        code, _, err = run_cli(
            ["sweep", "--out", str(tmp_path / "x"), "--axis", "demand",
             "--points", "1,2", "--configs", "bogus"], capsys)
        assert code == 2
        assert read_error(err)["error"] == "invalid-input"

    def test_bad_points_string(self, tmp_path, capsys):
        code, _, err = run_cli(
            ["sweep", "--out", str(tmp_path / "x"), "--axis", "demand",
             "--points", "2,1", "--configs", "centralized"], capsys)
        assert code == 2
        assert read_error(err)["error"] == "invalid-input"

    def test_rerun_is_byte_identical(self, tmp_path, capsys):
        argv = ["sweep", "--axis", "battery_cost", "--points", "1,3",
                "--configs", "centralized+reg,decentralized+reg",
                "--mc-samples", "100000", "--seed", "5"]
        dirs = [tmp_path / "a", tmp_path / "b"]
        for d in dirs:
            code, _, _ = run_cli(argv + ["--out", str(d)], capsys)
            assert code == 0
        a, b = [(d / "sweep.csv").read_bytes() for d in dirs]
        assert a == b
        svg_a, svg_b = [(d / "sweep_cost_density.svg").read_bytes()
                        for d in dirs]
        assert svg_a == svg_b


class TestSimulate:
    def test_centralized_needs_design(self, tmp_path, capsys):
        code, _, err = run_cli(
            ["simulate", "--out", str(tmp_path / "x")], capsys)
        assert code == 2
        payload = read_error(err)
        assert payload["error"] == "missing-input"
        assert "--rho-c" in payload["message"]

    def test_decentralized_needs_stock(self, tmp_path, capsys):
        code, _, err = run_cli(
            ["simulate", "--out", str(tmp_path / "x"),
             "--architecture", "decentralized"], capsys)
        assert code == 2
        assert read_error(err)["error"] == "missing-input"

    def test_stats_rerun_is_byte_identical(self, tmp_path, capsys):
        argv = ["simulate", "--rho-c", "0.01", "--q", "20",
                "--horizon", "600", "--seed", "3"]
        dirs = [tmp_path / "a", tmp_path / "b"]
        for d in dirs:
            code, _, _ = run_cli(argv + ["--out", str(d)], capsys)
            assert code == 0
        a, b = [(d / "stats.csv").read_bytes() for d in dirs]
        assert a == b
        text = a.decode()
        assert text.startswith("metric,value\n")
        assert "swap_stockout," in text
        assert "numpy" not in text  # scalars must serialize as plain floats

    def test_decentralized_run(self, tmp_path, capsys):
        out_dir = tmp_path / "dec"
        code, _, _ = run_cli(
            ["simulate", "--architecture", "decentralized", "--r-b", "2.6",
             "--horizon", "600", "--out", str(out_dir)], capsys)
        assert code == 0
        text = (out_dir / "stats.csv").read_text()
        assert "onsite_stockout," in text
        assert "swap_stockout," not in text


class TestReport:
    def test_full_report(self, tmp_path, capsys):
        out_dir = tmp_path / "rep"
        code, out, _ = run_cli(
            ["report", "--out", str(out_dir), "--mc-samples", "100000"],
            capsys)
        assert code == 0
        lines = (out_dir / "report.csv").read_text().strip().splitlines()
        assert len(lines) == 5
        labels = [ln.split(",")[0] for ln in lines[1:]]
        assert labels == ["centralized", "centralized+reg",
                          "decentralized", "decentralized+reg"]
        for fig in ("bars.svg", "radar.svg", "eta.svg", "surface.svg"):
            assert (out_dir / fig).exists()
        # single-command entry point matches the library pipeline
        row = dict(zip(lines[0].split(","), lines[1].split(",")))
        direct = run_configuration(Configuration("centralized", False),
                                   baseline_params(), baseline_profile())
        assert float(row["cost_density"]) == direct.cost_density

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["--version"])
        assert info.value.code == 0
        assert capsys.readouterr().out.strip() == __version__
