"""
Tests for bfar_radar.cli (the ``bfar`` CLI command).

Covers:
- --version / -V, including the fallback when package metadata is missing
- simulate: files written, seed from flag / BFAR_SEED / config file
- detect: text and json output, --out, --k, inferred PGM format, exit codes
- analyze: closed-form values, --pfab-table, bad --format
- mc-validate: exit 0 on agreement, exit 1 on disagreement or too few trials
- roc: param,pfa,pd table and CSV output, malformed --values
- eval: metrics on hand-built trajectories, --out, length options
- learn / sweep: error paths and invalid-only grids (no odometry needed)
- odom: trajectory written for the synthetic benchmark
- --config: defaults from file, flags override, bad file exits 2
- main(): returns exit codes instead of raising
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest
from typer.testing import CliRunner

from bfar_radar.analysis import pfa_closed_form, pfa_upper_bound
from bfar_radar.cli import app, main
from bfar_radar.config import SEED_ENV_VAR
from bfar_radar.io import read_points, read_trajectory, write_trajectory
from bfar_radar.trajectory import Trajectory

runner = CliRunner()

_SMALL_SIM = [
    "--poses", "3",
    "--landmarks", "20",
    "--step", "1.0",
    "--azimuths", "90",
    "--bins", "100",
    "--resolution", "0.5",
]


def _straight(path: Path, scale: float = 1.0) -> Path:
    t = np.arange(11, dtype=float)
    traj = Trajectory.from_arrays(t, scale * t, np.zeros(11), np.zeros(11))
    return write_trajectory(traj, path)


# ---------------------------------------------------------------------------
# --version
# ---------------------------------------------------------------------------


class TestCLIVersion:
    def test_version_exits_0(self) -> None:
        result = runner.invoke(app, ["--version"])
        assert result.exit_code == 0
        assert "bfar-radar" in result.output

    def test_version_short_flag_exits_0(self) -> None:
        result = runner.invoke(app, ["-V"])
        assert result.exit_code == 0

    def test_version_fallback_when_package_not_found(self, monkeypatch: pytest.MonkeyPatch) -> None:
        from importlib.metadata import PackageNotFoundError

        import bfar_radar.cli as cli_module

        monkeypatch.setattr(
            cli_module,
            "_metadata_version",
            lambda _: (_ for _ in ()).throw(PackageNotFoundError()),
        )
        result = runner.invoke(app, ["--version"])
        assert result.exit_code == 0
        assert "unknown" in result.output

    def test_no_args_shows_help(self) -> None:
        result = runner.invoke(app, [])
        assert "simulate" in result.output


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


class TestCLISimulate:
    def test_writes_benchmark(self, tmp_path: Path) -> None:
        out = tmp_path / "bench"
        result = runner.invoke(app, ["simulate", "--out-dir", str(out), "--seed", "7", *_SMALL_SIM])
        assert result.exit_code == 0, result.output
        assert sorted(p.name for p in (out / "scans").glob("scan_*.csv")) == [
            "scan_0000.csv",
            "scan_0001.csv",
            "scan_0002.csv",
        ]
        assert len(read_trajectory(out / "trajectory.csv")) == 3
        assert (out / "landmarks.csv").read_text().startswith("x,y,snr")
        assert "Seed:        7" in result.output

    def test_json(self, tmp_path: Path) -> None:
        result = runner.invoke(
            app,
            [
                "simulate", "--out-dir", str(tmp_path),
                "--seed", "7", "--format", "json", *_SMALL_SIM,
            ],
        )
        data = json.loads(result.output)
        assert data["seed"] == 7
        assert data["scans"] == 3
        assert data["landmark_count"] == 20
        assert data["path_length_m"] == pytest.approx(2.0)

    def test_pgm_format(self, tmp_path: Path) -> None:
        result = runner.invoke(
            app,
            ["simulate", "--out-dir", str(tmp_path), "--scan-format", "pgm8", *_SMALL_SIM],
        )
        assert result.exit_code == 0, result.output
        assert len(list((tmp_path / "scans").glob("scan_*.pgm"))) == 3

    def test_seed_from_environment(self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv(SEED_ENV_VAR, "11")
        result = runner.invoke(
            app, ["simulate", "--out-dir", str(tmp_path), "--format", "json", *_SMALL_SIM]
        )
        assert json.loads(result.output)["seed"] == 11

    def test_same_seed_same_scans(self, tmp_path: Path) -> None:
        for name in ("one", "two"):
            runner.invoke(
                app, ["simulate", "--out-dir", str(tmp_path / name), "--seed", "3", *_SMALL_SIM]
            )
        first = (tmp_path / "one" / "scans" / "scan_0002.csv").read_text()
        assert first == (tmp_path / "two" / "scans" / "scan_0002.csv").read_text()

    def test_invalid_geometry_exits_1(self, tmp_path: Path) -> None:
        result = runner.invoke(
            app, ["simulate", "--out-dir", str(tmp_path), "--poses", "2", "--bins", "0"]
        )
        assert result.exit_code == 1
        assert "Error:" in result.output

    def test_bad_seed_environment_exits_1(
        self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.setenv(SEED_ENV_VAR, "banana")
        result = runner.invoke(app, ["simulate", "--out-dir", str(tmp_path), *_SMALL_SIM])
        assert result.exit_code == 1
        assert SEED_ENV_VAR in result.output


# ---------------------------------------------------------------------------
# detect
# ---------------------------------------------------------------------------


class TestCLIDetect:
    def test_text(self, scan_file: Path) -> None:
        result = runner.invoke(app, ["detect", "--scan", str(scan_file)])
        assert result.exit_code == 0, result.output
        assert "Detections:  3" in result.output
        assert "BFAR a=1 b=20 W=40 guard=2" in result.output

    def test_json(self, scan_file: Path) -> None:
        result = runner.invoke(app, ["detect", "--scan", str(scan_file), "--format", "json"])
        data = json.loads(result.output)
        assert data["detections"] == 3
        assert data["cells"] == 4 * 64
        assert data["output"] is None

    def test_out_writes_points(self, scan_file: Path, tmp_path: Path) -> None:
        out = tmp_path / "pts.csv"
        result = runner.invoke(app, ["detect", "--scan", str(scan_file), "--out", str(out)])
        assert result.exit_code == 0
        points = read_points(out)
        assert points.shape == (3, 3)
        assert sorted(points[:, 2].tolist()) == [300.0, 400.0, 500.0]

    def test_k_strongest(self, scan_file: Path) -> None:
        result = runner.invoke(
            app, ["detect", "--scan", str(scan_file), "--k", "2", "--format", "json"]
        )
        data = json.loads(result.output)
        assert data["detector"] == "k-strongest k=2"
        assert data["detections"] == 8

    def test_estimator_option(self, scan_file: Path) -> None:
        result = runner.invoke(
            app,
            [
                "detect", "--scan", str(scan_file),
                "--estimator", "ordered_statistic", "--os-rank", "30",
            ],
        )
        assert result.exit_code == 0, result.output
        assert "ordered_statistic(k=30)" in result.output

    def test_pgm_inferred_from_extension(self, pgm_file: Path) -> None:
        result = runner.invoke(app, ["detect", "--scan", str(pgm_file), "--format", "json"])
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)["detections"] == 3

    def test_missing_file_exits_2(self, tmp_path: Path) -> None:
        result = runner.invoke(app, ["detect", "--scan", str(tmp_path / "nope.csv")])
        assert result.exit_code == 2
        assert "file not found" in result.output

    def test_invalid_params_exit_1(self, scan_file: Path) -> None:
        result = runner.invoke(app, ["detect", "--scan", str(scan_file), "--a", "-1"])
        assert result.exit_code == 1
        assert "Error:" in result.output

    def test_window_too_wide_for_scan_exits_1(self, scan_file: Path) -> None:
        result = runner.invoke(app, ["detect", "--scan", str(scan_file), "--window", "80"])
        assert result.exit_code == 1

    def test_unknown_format_exits_2(self, scan_file: Path) -> None:
        result = runner.invoke(app, ["detect", "--scan", str(scan_file), "--format", "xml"])
        assert result.exit_code == 2
        assert "unknown format" in result.output


# ---------------------------------------------------------------------------
# analyze / roc
# ---------------------------------------------------------------------------


class TestCLIAnalyze:
    def test_text(self) -> None:
        result = runner.invoke(
            app, ["analyze", "--a", "0.1", "--b", "10", "--mu", "5", "--w", "16"]
        )
        assert result.exit_code == 0
        assert f"{pfa_closed_form(0.1, 10.0, 5.0, 16):.6g}" in result.output

    def test_json(self) -> None:
        result = runner.invoke(
            app,
            ["analyze", "--a", "1", "--b", "20", "--mu", "5", "--s", "10", "--format", "json"],
        )
        data = json.loads(result.output)
        assert data["pfa"] == pytest.approx(pfa_closed_form(1.0, 20.0, 5.0, 40))
        assert data["pfa_upper_bound"] == pytest.approx(2.0**-40)
        assert data["pd"] > data["pfa"]
        assert data["trials"] is None

    def test_pfab_table(self) -> None:
        result = runner.invoke(
            app, ["analyze", "--pfab-table", "--a-grid", "0.5,1", "--w", "20", "--format", "json"]
        )
        table = json.loads(result.output)["table"]
        assert [row["a"] for row in table] == [0.5, 1.0]
        assert table[1]["pfab"] == pytest.approx(pfa_upper_bound(1.0, 20))

    def test_pfab_table_text(self) -> None:
        result = runner.invoke(app, ["analyze", "--pfab-table"])
        assert result.exit_code == 0
        assert "PFAB (w=40)" in result.output
        assert len(result.output.strip().splitlines()) == 8

    def test_domain_error_exits_1(self) -> None:
        result = runner.invoke(app, ["analyze", "--mu", "0"])
        assert result.exit_code == 1
        assert "Error:" in result.output

    def test_bad_grid_exits_2(self) -> None:
        result = runner.invoke(app, ["analyze", "--pfab-table", "--a-grid", "x,y"])
        assert result.exit_code == 2


class TestCLIRoc:
    def test_table(self) -> None:
        result = runner.invoke(app, ["roc", "--values", "0,10,20"])
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        assert lines[0] == "param,pfa,pd"
        assert len(lines) == 4
        pfas = [float(line.split(",")[1]) for line in lines[1:]]
        assert pfas == sorted(pfas, reverse=True)

    def test_out(self, tmp_path: Path) -> None:
        out = tmp_path / "roc.csv"
        result = runner.invoke(
            app, ["roc", "--sweep", "a", "--values", "0.1,0.5", "--fixed", "5", "--out", str(out)]
        )
        assert result.exit_code == 0
        assert out.read_text().splitlines()[0] == "param,pfa,pd"

    def test_json(self) -> None:
        result = runner.invoke(app, ["roc", "--values", "5", "--format", "json"])
        data = json.loads(result.output)
        assert data["sweep"] == "b"
        assert data["points"][0]["param"] == 5.0

    def test_bad_values_exit_2(self) -> None:
        result = runner.invoke(app, ["roc", "--values", "1,,abc"])
        assert result.exit_code == 2

    def test_negative_fixed_exits_1(self) -> None:
        result = runner.invoke(app, ["roc", "--sweep", "b", "--values", "0", "--fixed", "-1"])
        assert result.exit_code == 1


# ---------------------------------------------------------------------------
# mc-validate
# ---------------------------------------------------------------------------

_MC_POINT = ["--a", "0.05", "--b", "2", "--mu", "1", "--w", "16", "--trials", "20000"]


class TestCLIMcValidate:
    def test_agreement_exits_0(self) -> None:
        result = runner.invoke(app, ["mc-validate", *_MC_POINT, "--seed", "1"])
        assert result.exit_code == 0, result.output
        lines = result.output.strip().splitlines()
        assert lines[0] == "a,b,mu,s,w,closed_pfa,mc_pfa,halfwidth,pass"
        assert lines[1].endswith(",true")

    def test_zero_band_exits_1(self) -> None:
        result = runner.invoke(app, ["mc-validate", *_MC_POINT, "--sigmas", "0"])
        assert result.exit_code == 1
        assert ",false" in result.output

    def test_too_few_trials_exits_1(self) -> None:
        result = runner.invoke(app, ["mc-validate", "--trials", "100"])
        assert result.exit_code == 1
        assert "trials" in result.output

    def test_out(self, tmp_path: Path) -> None:
        out = tmp_path / "validation.csv"
        runner.invoke(app, ["mc-validate", *_MC_POINT, "--out", str(out)])
        lines = out.read_text().splitlines()
        assert lines[0].endswith(",pass")
        assert len(lines) == 2


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------


class TestCLIEval:
    def test_text(self, tmp_path: Path) -> None:
        est = _straight(tmp_path / "est.csv", scale=1.1)
        gt = _straight(tmp_path / "gt.csv")
        result = runner.invoke(
            app, ["eval", "--est", str(est), "--gt", str(gt), "--lengths", "5,10"]
        )
        assert result.exit_code == 0, result.output
        assert "Translation: 10.0000 %" in result.output

    def test_json_and_out(self, tmp_path: Path) -> None:
        est = _straight(tmp_path / "est.csv", scale=1.1)
        gt = _straight(tmp_path / "gt.csv")
        out = tmp_path / "metrics.csv"
        result = runner.invoke(
            app,
            [
                "eval", "--est", str(est), "--gt", str(gt),
                "--lengths", "5", "--format", "json", "--out", str(out),
            ],
        )
        data = json.loads(result.output)
        assert data["lengths_m"] == [5.0]
        assert data["transl_pct"] == pytest.approx(10.0)
        assert out.read_text().splitlines()[0] == "transl_pct,rot_deg_per_100m,ate_m"

    def test_default_lengths_too_long_exits_1(self, tmp_path: Path) -> None:
        gt = _straight(tmp_path / "gt.csv")
        result = runner.invoke(app, ["eval", "--est", str(gt), "--gt", str(gt)])
        assert result.exit_code == 1
        assert "too short" in result.output

    def test_both_length_options_exit_2(self, tmp_path: Path) -> None:
        gt = _straight(tmp_path / "gt.csv")
        result = runner.invoke(
            app,
            ["eval", "--est", str(gt), "--gt", str(gt), "--lengths", "5", "--kitti-lengths"],
        )
        assert result.exit_code == 2

    def test_missing_gt_exits_2(self, tmp_path: Path) -> None:
        est = _straight(tmp_path / "est.csv")
        result = runner.invoke(app, ["eval", "--est", str(est), "--gt", str(tmp_path / "x.csv")])
        assert result.exit_code == 2

    def test_mismatched_lengths_exit_1(self, tmp_path: Path) -> None:
        gt = _straight(tmp_path / "gt.csv")
        short = tmp_path / "short.csv"
        write_trajectory(read_trajectory(gt)[:5], short)
        result = runner.invoke(
            app, ["eval", "--est", str(short), "--gt", str(gt), "--lengths", "2"]
        )
        assert result.exit_code == 1
        assert "mismatch" in result.output


# ---------------------------------------------------------------------------
# learn / sweep / odom
# ---------------------------------------------------------------------------


class TestCLILearn:
    def test_all_invalid_exits_1(self, benchmark_dir: Path) -> None:
        result = runner.invoke(
            app,
            [
                "learn",
                "--scans", str(benchmark_dir / "scans"),
                "--gt", str(benchmark_dir / "trajectory.csv"),
                "--a-grid", "0", "--b-grid", "0", "--lengths", "5,10",
            ],
        )
        assert result.exit_code == 1
        assert "failed or were invalid" in result.output

    def test_too_short_for_default_lengths(self, benchmark_dir: Path) -> None:
        result = runner.invoke(
            app,
            [
                "learn",
                "--scans", str(benchmark_dir / "scans"),
                "--gt", str(benchmark_dir / "trajectory.csv"),
            ],
        )
        assert result.exit_code == 1
        assert "too short" in result.output

    def test_missing_scans_exit_2(self, tmp_path: Path) -> None:
        gt = _straight(tmp_path / "gt.csv")
        result = runner.invoke(
            app, ["learn", "--scans", str(tmp_path / "none"), "--gt", str(gt)]
        )
        assert result.exit_code == 2

    def test_bad_grid_exits_2(self, benchmark_dir: Path) -> None:
        result = runner.invoke(
            app,
            [
                "learn",
                "--scans", str(benchmark_dir / "scans"),
                "--gt", str(benchmark_dir / "trajectory.csv"),
                "--b-grid", "",
            ],
        )
        assert result.exit_code == 2


class TestCLISweep:
    def test_invalid_only_row(self, benchmark_dir: Path, tmp_path: Path) -> None:
        out = tmp_path / "sweep.csv"
        result = runner.invoke(
            app,
            [
                "sweep",
                "--scans", str(benchmark_dir / "scans"),
                "--gt", str(benchmark_dir / "trajectory.csv"),
                "--pfa-grid", "1", "--lengths", "5,10", "--out", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        assert result.output.strip().splitlines()[-1].endswith("invalid")
        lines = out.read_text().splitlines()
        assert lines[0].startswith("pfa,a,transl_pct")
        assert lines[1].endswith(",invalid")

    def test_pfa_out_of_range_exits_1(self, benchmark_dir: Path) -> None:
        result = runner.invoke(
            app,
            [
                "sweep",
                "--scans", str(benchmark_dir / "scans"),
                "--gt", str(benchmark_dir / "trajectory.csv"),
                "--pfa-grid", "2", "--lengths", "5",
            ],
        )
        assert result.exit_code == 1


@pytest.mark.slow
class TestCLIOdom:
    def test_writes_trajectory(self, benchmark_dir: Path, tmp_path: Path) -> None:
        out = tmp_path / "est.csv"
        result = runner.invoke(
            app,
            ["odom", "--scans", str(benchmark_dir / "scans"), "--a", "0.25", "--out", str(out)],
        )
        assert result.exit_code in (0, 1), result.output
        estimate = read_trajectory(out)
        assert len(estimate) >= 1
        assert estimate.timestamps[:2].tolist() == [0.0, 0.25][: len(estimate)]
        assert "Result:" in result.output

    def test_empty_directory_exits_1(self, tmp_path: Path) -> None:
        (tmp_path / "scans").mkdir()
        result = runner.invoke(app, ["odom", "--scans", str(tmp_path / "scans")])
        assert result.exit_code == 1


# ---------------------------------------------------------------------------
# --config and main()
# ---------------------------------------------------------------------------


class TestCLIConfig:
    def test_config_supplies_defaults(self, tmp_path: Path) -> None:
        cfg = tmp_path / "bfar.cfg"
        cfg.write_text("# sim\nseed = 5\nformat = json\n")
        result = runner.invoke(
            app, ["--config", str(cfg), "simulate", "--out-dir", str(tmp_path), *_SMALL_SIM]
        )
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)["seed"] == 5

    def test_flag_overrides_config(self, tmp_path: Path) -> None:
        cfg = tmp_path / "bfar.cfg"
        cfg.write_text("seed = 5\nformat = json\n")
        result = runner.invoke(
            app,
            [
                "--config", str(cfg),
                "simulate", "--out-dir", str(tmp_path), "--seed", "9", *_SMALL_SIM,
            ],
        )
        assert json.loads(result.output)["seed"] == 9

    def test_detector_keys(self, tmp_path: Path, scan_file: Path) -> None:
        cfg = tmp_path / "bfar.cfg"
        cfg.write_text("a = 0.5\nb = 10\nwindow = 16\nguard = 1\n")
        result = runner.invoke(app, ["--config", str(cfg), "detect", "--scan", str(scan_file)])
        assert result.exit_code == 0, result.output
        assert "BFAR a=0.5 b=10 W=16 guard=1" in result.output

    def test_malformed_config_exits_2(self, tmp_path: Path) -> None:
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("window 40\n")
        result = runner.invoke(app, ["--config", str(cfg), "analyze"])
        assert result.exit_code == 2
        assert "expected key=value" in result.output

    def test_missing_config_exits_2(self, tmp_path: Path) -> None:
        result = runner.invoke(app, ["--config", str(tmp_path / "none.cfg"), "analyze"])
        assert result.exit_code == 2


class TestMain:
    def test_success_returns_0(self) -> None:
        assert main(["analyze"]) == 0

    def test_domain_error_returns_1(self) -> None:
        assert main(["analyze", "--mu", "-1"]) == 1

    def test_usage_error_returns_2(self) -> None:
        assert main(["analyze", "--no-such-flag"]) == 2

    def test_version_returns_0(self) -> None:
        assert main(["--version"]) == 0
