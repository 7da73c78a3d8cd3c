"""
Command-line interface for bfar-radar.

Entry point: ``bfar`` (configured in ``pyproject.toml``).

Commands
--------
simulate     Render the synthetic benchmark: scans, trajectory, landmarks.
detect       Run BFAR (or k-strongest) on one scan and write the point cloud.
analyze      Closed-form PFA / PD / PFA bound, optionally a PFAB table.
mc-validate  Monte Carlo vs closed form - exit 1 if any point disagrees.
roc          Closed-form ROC along an ``a`` or ``b`` sweep.
odom         ICP odometry over a scan directory.
eval         KITTI relative errors and ATE of an estimated trajectory.
learn        Grid search over ``(a, b)`` on a training sequence.
sweep        CA-CFAR sensitivity sweep over false-alarm rates.

Global options ``--config FILE`` (``key=value`` defaults for every command),
``--verbose/-v`` (repeat for debug output) and ``--version``. Randomness is
governed by ``--seed``, falling back to ``$BFAR_SEED`` and then 42.

Exit codes: 0 success, 1 domain error (or failed check), 2 usage error.

Installation
------------
Install the CLI extra::

    pip install "bfar-radar[cli]"

Usage
-----
::

    bfar simulate --out-dir bench/ --seed 42
    bfar detect --scan bench/scans/scan_0000.csv --a 1 --b 20 --window 40 --guard 2 --out pts.csv
    bfar analyze --a 1 --b 20 --mu 5 --s 10 --w 40
    bfar analyze --pfab-table --a-grid 0.25,0.5,1,2,3 --w 20
    bfar mc-validate --a 1 --b 20 --mu 5 --w 40 --trials 1000000
    bfar mc-validate --grid --trials 10000000 --out validation.csv
    bfar roc --sweep b --values 0,5,10,20,40 --fixed 0.1 --mu 5 --s 10 --out roc.csv
    bfar odom --scans bench/scans --a 1 --b 20 --out est.csv
    bfar eval --est est.csv --gt bench/trajectory.csv --lengths 10,20,30
    bfar learn --scans bench/scans --gt bench/trajectory.csv --out grid.csv
    bfar sweep --scans bench/scans --gt bench/trajectory.csv --out sweep.csv

Authors
-------
Chaitanya Kasaraneni
"""

from __future__ import annotations

import json
import logging
import sys
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import TYPE_CHECKING, Annotated

try:
    import typer

    _TYPER_AVAILABLE = True
except ImportError:  # pragma: no cover
    _TYPER_AVAILABLE = False

from bfar_radar.enums import EstimatorKind, Objective, ScanFormat, SweepParameter
from bfar_radar.errors import BfarError
from bfar_radar.params import DEFAULT_GUARD_PER_SIDE, DEFAULT_WINDOW_W

if TYPE_CHECKING:
    from bfar_radar.params import DetectorSpec

logger = logging.getLogger(__name__)

#: Config-file keys that differ from the Python parameter they set.
_CONFIG_ALIASES = {"format": "fmt"}

if _TYPER_AVAILABLE:
    from importlib.metadata import PackageNotFoundError
    from importlib.metadata import version as _metadata_version

    def _version_callback(value: bool) -> None:
        if value:
            try:
                _ver = _metadata_version("bfar-radar")
            except PackageNotFoundError:
                _ver = "unknown"
            typer.echo(f"bfar-radar {_ver}")
            raise typer.Exit()

    app = typer.Typer(
        name="bfar",
        help="BFAR radar detection toolkit: detection, analysis, simulation, odometry.",
        no_args_is_help=True,
        pretty_exceptions_enable=False,
    )

    @app.callback()
    def _main_callback(
        ctx: typer.Context,
        version: Annotated[
            bool,
            typer.Option(
                "--version",
                "-V",
                help="Show version and exit.",
                callback=_version_callback,
                is_eager=True,
            ),
        ] = False,
        verbose: Annotated[
            int,
            typer.Option(
                "--verbose",
                "-v",
                count=True,
                help="Log progress to stderr (-v info, -vv debug).",
            ),
        ] = 0,
        config: Annotated[
            Path | None,
            typer.Option(
                "--config",
                help="key=value file supplying option defaults; flags take precedence.",
                metavar="FILE",
            ),
        ] = None,
    ) -> None:
        from bfar_radar.config import load_config

        if verbose:
            logging.basicConfig(
                level=logging.DEBUG if verbose > 1 else logging.INFO,
                format="%(levelname)s %(name)s: %(message)s",
            )
        if config is not None:
            try:
                values = load_config(config)
            except (BfarError, OSError) as exc:
                typer.echo(f"Error: {exc}", err=True)
                raise typer.Exit(code=2) from exc
            defaults = {_CONFIG_ALIASES.get(k, k): v for k, v in values.items()}
            ctx.default_map = {name: dict(defaults) for name in _COMMAND_NAMES}

    # ---------------------------------------------------------------------------
    # Shared option types
    # ---------------------------------------------------------------------------

    _FormatOption = Annotated[
        str,
        typer.Option(
            "--format",
            "-f",
            help="Console output: 'text' (default) or 'json'.",
            metavar="FORMAT",
        ),
    ]

    _OutOption = Annotated[
        Path | None,
        typer.Option("--out", "-o", help="Destination CSV file.", metavar="PATH"),
    ]

    _SeedOption = Annotated[
        int | None,
        typer.Option("--seed", help="Random seed (default: $BFAR_SEED, else 42).", metavar="N"),
    ]

    _ScanFormatOption = Annotated[
        ScanFormat,
        typer.Option("--scan-format", help="Scan file format.", case_sensitive=False),
    ]

    _AOption = Annotated[float, typer.Option("--a", help="Scale a applied to Z.", metavar="A")]
    _BOption = Annotated[float, typer.Option("--b", help="Offset b (intensity).", metavar="B")]
    _MuOption = Annotated[float, typer.Option("--mu", help="Background power mu.", metavar="MU")]
    _SnrOption = Annotated[float, typer.Option("--s", help="Target SNR S.", metavar="S")]
    _WOption = Annotated[int, typer.Option("--w", help="Reference-cell count W.", metavar="W")]

    _WindowOption = Annotated[
        int,
        typer.Option("--window", help="Reference cells W (both sides together).", metavar="W"),
    ]
    _GuardOption = Annotated[
        int, typer.Option("--guard", help="Guard cells on each side of the CUT.", metavar="G")
    ]
    _EstimatorOption = Annotated[
        EstimatorKind,
        typer.Option("--estimator", help="Noise-level estimator.", case_sensitive=False),
    ]
    _OsRankOption = Annotated[
        int | None,
        typer.Option("--os-rank", help="k for the ordered-statistic estimator.", metavar="K"),
    ]
    _KOption = Annotated[
        int | None,
        typer.Option("--k", help="Use the k-strongest filter instead of BFAR.", metavar="K"),
    ]
    _LengthsOption = Annotated[
        str,
        typer.Option(
            "--lengths",
            help="Comma-separated sub-sequence lengths in metres (default 10..80).",
            metavar="LIST",
        ),
    ]
    _KittiLengthsOption = Annotated[
        bool,
        typer.Option("--kitti-lengths", help="Use the 100..800 m KITTI lengths."),
    ]
    _GateOption = Annotated[
        float, typer.Option("--gate", help="ICP association gate in metres.", metavar="M")
    ]
    _WorkersOption = Annotated[
        int, typer.Option("--workers", help="Worker threads.", metavar="N")
    ]
    _ScansOption = Annotated[
        Path, typer.Option("--scans", help="Directory of scan_NNNN files.", metavar="DIR")
    ]
    _GtOption = Annotated[
        Path, typer.Option("--gt", help="Ground-truth trajectory CSV.", metavar="FILE")
    ]

    # ---------------------------------------------------------------------------
    # Helpers
    # ---------------------------------------------------------------------------

    def _print_json(data: dict[str, object]) -> None:
        typer.echo(json.dumps(data, indent=2))

    def _validate_fmt(fmt: str) -> None:
        """Exit 2 if fmt is not a recognised output format."""
        if fmt not in ("text", "json"):
            typer.echo(f"Error: unknown format '{fmt}'. Use 'text' or 'json'.", err=True)
            raise typer.Exit(code=2)

    def _parse_floats(text: str, option: str) -> list[float]:
        """Parse a comma-separated list; exit 2 on malformed input."""
        try:
            values = [float(v) for v in text.split(",") if v.strip()]
        except ValueError as exc:
            typer.echo(f"Error: {option} expects comma-separated numbers, got {text!r}.", err=True)
            raise typer.Exit(code=2) from exc
        if not values:
            typer.echo(f"Error: {option} must not be empty.", err=True)
            raise typer.Exit(code=2)
        return values

    def _resolve_lengths(lengths: str, kitti_lengths: bool) -> tuple[float, ...]:
        from bfar_radar.metrics import DESK_LENGTHS_M, KITTI_LENGTHS_M

        if kitti_lengths and lengths:
            typer.echo("Error: use either --lengths or --kitti-lengths, not both.", err=True)
            raise typer.Exit(code=2)
        if kitti_lengths:
            return KITTI_LENGTHS_M
        if lengths:
            return tuple(_parse_floats(lengths, "--lengths"))
        return DESK_LENGTHS_M

    def _require_exists(path: Path) -> None:
        if not path.exists():
            typer.echo(f"Error: file not found: {path}", err=True)
            raise typer.Exit(code=2)

    @contextmanager
    def _domain_errors() -> Iterator[None]:
        """Map library errors to exit code 1 with an ``Error:`` line."""
        try:
            yield
        except (BfarError, OSError) as exc:
            typer.echo(f"Error: {exc}", err=True)
            raise typer.Exit(code=1) from exc

    def _detector_spec(
        a: float,
        b: float,
        window: int,
        guard: int,
        estimator: EstimatorKind,
        os_rank: int | None,
        k: int | None,
    ) -> DetectorSpec:
        from bfar_radar.params import DetectorParams, KStrongestParams

        if k is not None:
            return KStrongestParams(k)
        return DetectorParams(
            scale_a=a,
            offset_b=b,
            window_w=window,
            guard_per_side=guard,
            estimator_kind=estimator,
            os_rank=os_rank,
        )

    # ---------------------------------------------------------------------------
    # simulate
    # ---------------------------------------------------------------------------

    @app.command("simulate")
    def simulate_cmd(
        out_dir: Annotated[
            Path,
            typer.Option(
                "--out-dir", help="Directory receiving scans/ and the CSVs.", metavar="DIR"
            ),
        ],
        scan_format: _ScanFormatOption = ScanFormat.CSV_FLOAT,
        poses: Annotated[int, typer.Option("--poses", help="Number of scans.")] = 50,
        landmarks: Annotated[
            int, typer.Option("--landmarks", help="Landmarks in the world.")
        ] = 200,
        step: Annotated[float, typer.Option("--step", help="Metres travelled per scan.")] = 1.75,
        yaw_rate: Annotated[float, typer.Option("--yaw-rate", help="Turn rate in rad/s.")] = 0.04,
        dt: Annotated[float, typer.Option("--dt", help="Seconds between scans.")] = 0.25,
        azimuths: Annotated[int, typer.Option("--azimuths", help="Azimuths per scan.")] = 400,
        bins: Annotated[int, typer.Option("--bins", help="Range bins per azimuth.")] = 512,
        resolution: Annotated[
            float, typer.Option("--resolution", help="Metres per range bin.")
        ] = 0.25,
        seed: _SeedOption = None,
        fmt: _FormatOption = "text",
    ) -> None:
        """Render the synthetic benchmark.

        Writes ``scans/scan_NNNN.<ext>`` (+ ``.meta``), ``trajectory.csv``
        (t,x,y,yaw) and ``landmarks.csv`` (x,y,snr) under --out-dir.

        Exits 0 on success, 1 on invalid parameters.
        """
        from bfar_radar.config import resolve_seed
        from bfar_radar.io import write_landmarks, write_scan_directory, write_trajectory
        from bfar_radar.simulator import SimConfig, build_benchmark

        _validate_fmt(fmt)
        with _domain_errors():
            resolved = resolve_seed(seed)
            bench = build_benchmark(
                resolved,
                num_poses=poses,
                num_landmarks=landmarks,
                step_m=step,
                yaw_rate=yaw_rate,
                dt=dt,
                config=SimConfig(azimuths, bins, resolution),
            )
            paths = write_scan_directory(bench.scans, out_dir / "scans", scan_format)
            traj_path = write_trajectory(bench.trajectory, out_dir / "trajectory.csv")
            lm_path = write_landmarks(bench.world.landmark_table(), out_dir / "landmarks.csv")

        if fmt == "json":
            _print_json(
                {
                    "seed": resolved,
                    "scans": len(paths),
                    "scan_dir": str(out_dir / "scans"),
                    "trajectory": str(traj_path),
                    "landmarks": str(lm_path),
                    "landmark_count": len(bench.world.landmarks),
                    "path_length_m": bench.trajectory.length,
                }
            )
        else:
            typer.echo(f"Seed:        {resolved}")
            typer.echo(f"Scans:       {len(paths)} -> {out_dir / 'scans'}")
            typer.echo(f"Trajectory:  {traj_path} ({bench.trajectory.length:.1f} m)")
            typer.echo(f"Landmarks:   {lm_path} ({len(bench.world.landmarks)})")

    # ---------------------------------------------------------------------------
    # detect
    # ---------------------------------------------------------------------------

    @app.command("detect")
    def detect_cmd(
        scan: Annotated[Path, typer.Option("--scan", help="Scan file.", metavar="FILE")],
        out: _OutOption = None,
        scan_format: Annotated[
            ScanFormat | None,
            typer.Option(
                "--scan-format",
                help="Scan file format (default: from the extension).",
                case_sensitive=False,
            ),
        ] = None,
        a: _AOption = 1.0,
        b: _BOption = 20.0,
        window: _WindowOption = DEFAULT_WINDOW_W,
        guard: _GuardOption = DEFAULT_GUARD_PER_SIDE,
        estimator: _EstimatorOption = EstimatorKind.CELL_AVERAGING,
        os_rank: _OsRankOption = None,
        k: _KOption = None,
        fmt: _FormatOption = "text",
    ) -> None:
        """Detect targets in one scan and write ``x,y,intensity`` points.

        Exits 0 on success, 1 on unreadable scans or invalid parameters,
        2 on usage errors.
        """
        from bfar_radar.detector import detect
        from bfar_radar.io import read_scan, write_points

        _validate_fmt(fmt)
        _require_exists(scan)
        with _domain_errors():
            spec = _detector_spec(a, b, window, guard, estimator, os_rank, k)
            polar = read_scan(scan, scan_format)
            detections = detect(polar, spec)
            if out is not None:
                write_points(detections.points, out)

        if fmt == "json":
            _print_json(
                {
                    "scan": str(scan),
                    "detector": spec.describe(),
                    "detections": detections.count,
                    "cells": polar.num_azimuths * polar.num_range_bins,
                    "output": str(out) if out else None,
                }
            )
        else:
            typer.echo(f"Scan:        {scan} ({polar.num_azimuths}x{polar.num_range_bins})")
            typer.echo(f"Detector:    {spec.describe()}")
            typer.echo(f"Detections:  {detections.count}")
            if out is not None:
                typer.echo(f"Output:      {out}")

    # ---------------------------------------------------------------------------
    # analyze
    # ---------------------------------------------------------------------------

    @app.command("analyze")
    def analyze_cmd(
        a: _AOption = 1.0,
        b: _BOption = 0.0,
        mu: _MuOption = 1.0,
        s: _SnrOption = 0.0,
        w: _WOption = DEFAULT_WINDOW_W,
        pfab_table: Annotated[
            bool, typer.Option("--pfab-table", help="Print PFAB for every value of --a-grid.")
        ] = False,
        a_grid: Annotated[
            str,
            typer.Option(
                "--a-grid", help="Comma-separated a values for --pfab-table.", metavar="LIST"
            ),
        ] = "0,0.1,0.25,0.5,1,2,3",
        fmt: _FormatOption = "text",
    ) -> None:
        """Closed-form PFA, PD and PFA bound for one parameter point.

        Exits 0 on success, 1 on domain errors.
        """
        from bfar_radar.analysis import detection_stats, pfab_table as make_table

        _validate_fmt(fmt)
        with _domain_errors():
            if pfab_table:
                table = make_table(_parse_floats(a_grid, "--a-grid"), w)
            else:
                stats = detection_stats(a, b, mu, s, w)

        if pfab_table:
            if fmt == "json":
                _print_json({"w": w, "table": [{"a": x, "pfab": p} for x, p in table]})
            else:
                typer.echo(f"{'a':>8}  {'PFAB (w=' + str(w) + ')':>16}")
                for x, p in table:
                    typer.echo(f"{x:>8g}  {p:>16.4g}")
            return

        if fmt == "json":
            _print_json({"a": a, "b": b, "mu": mu, "s": s, "w": w, **stats.to_dict()})
        else:
            typer.echo(f"PFA:         {stats.pfa:.6g}")
            typer.echo(f"PD:          {stats.pd:.6g}")
            typer.echo(f"PFA bound:   {stats.pfa_upper_bound:.6g}")

    # ---------------------------------------------------------------------------
    # mc-validate
    # ---------------------------------------------------------------------------

    @app.command("mc-validate")
    def mc_validate_cmd(
        a: _AOption = 1.0,
        b: _BOption = 20.0,
        mu: _MuOption = 5.0,
        s: _SnrOption = 0.0,
        w: _WOption = DEFAULT_WINDOW_W,
        guard: _GuardOption = DEFAULT_GUARD_PER_SIDE,
        trials: Annotated[
            int, typer.Option("--trials", help="Monte Carlo trials per point (>= 10000).")
        ] = 1_000_000,
        grid: Annotated[
            bool, typer.Option("--grid", help="Validate the built-in 24-point grid instead.")
        ] = False,
        sigmas: Annotated[
            float, typer.Option("--sigmas", help="Pass band in Wilson half-widths.")
        ] = 3.0,
        seed: _SeedOption = None,
        workers: _WorkersOption = 1,
        out: _OutOption = None,
        fmt: _FormatOption = "text",
    ) -> None:
        """Compare Monte Carlo estimates against the closed forms.

        Exits 0 if every point passes, 1 if any point disagrees or on
        domain errors.
        """
        from bfar_radar.analysis import (
            DEFAULT_VALIDATION_GRID,
            ValidationPoint,
            ValidationRow,
            mc_validate,
            validate_point,
        )
        from bfar_radar.config import resolve_seed
        from bfar_radar.io import write_csv

        _validate_fmt(fmt)
        with _domain_errors():
            resolved = resolve_seed(seed)
            if grid:
                rows = mc_validate(
                    DEFAULT_VALIDATION_GRID, trials, resolved, sigmas=sigmas, workers=workers
                )
            else:
                point = ValidationPoint(a, b, mu, s, w)
                rows = [
                    validate_point(
                        point, trials, resolved, guard=guard, sigmas=sigmas, workers=workers
                    )
                ]
            if out is not None:
                write_csv(out, ValidationRow.HEADER, (r.as_row() for r in rows))

        passed = all(r.passed for r in rows)
        if fmt == "json":
            _print_json(
                {
                    "seed": resolved,
                    "trials": trials,
                    "passed": passed,
                    "rows": [dict(zip(ValidationRow.HEADER, r.as_row())) for r in rows],
                }
            )
        else:
            typer.echo(",".join(ValidationRow.HEADER))
            for r in rows:
                typer.echo(
                    f"{r.a:g},{r.b:g},{r.mu:g},{r.s:g},{r.w},{r.closed_pfa:.6g},"
                    f"{r.mc_pfa:.6g},{r.halfwidth:.3g},{'true' if r.passed else 'false'}"
                )
            if out is not None:
                typer.echo(f"Output: {out}")

        raise typer.Exit(code=0 if passed else 1)

    # ---------------------------------------------------------------------------
    # roc
    # ---------------------------------------------------------------------------

    @app.command("roc")
    def roc_cmd(
        sweep: Annotated[
            SweepParameter,
            typer.Option("--sweep", help="Parameter to sweep.", case_sensitive=False),
        ] = SweepParameter.B,
        values: Annotated[
            str, typer.Option("--values", help="Comma-separated sweep values.", metavar="LIST")
        ] = "0,1,2,5,10,20,50,100",
        fixed: Annotated[
            float, typer.Option("--fixed", help="Value of the parameter not swept.")
        ] = 0.0,
        mu: _MuOption = 5.0,
        s: _SnrOption = 10.0,
        w: _WOption = DEFAULT_WINDOW_W,
        out: _OutOption = None,
        fmt: _FormatOption = "text",
    ) -> None:
        """Closed-form ROC (``param,pfa,pd``) along an a or b sweep.

        Exits 0 on success, 1 on domain errors, 2 on malformed --values.
        """
        from bfar_radar.analysis import ThresholdSweep, roc_curve
        from bfar_radar.io import write_csv

        _validate_fmt(fmt)
        parsed = _parse_floats(values, "--values")
        with _domain_errors():
            points = roc_curve(ThresholdSweep(sweep, tuple(parsed), fixed), mu, s, w)
            if out is not None:
                write_csv(out, ("param", "pfa", "pd"), ((p.param, p.pfa, p.pd) for p in points))

        if fmt == "json":
            _print_json(
                {
                    "sweep": sweep.value,
                    "fixed": fixed,
                    "points": [{"param": p.param, "pfa": p.pfa, "pd": p.pd} for p in points],
                }
            )
        else:
            typer.echo("param,pfa,pd")
            for p in points:
                typer.echo(f"{p.param:g},{p.pfa:.6g},{p.pd:.6g}")

    # ---------------------------------------------------------------------------
    # odom
    # ---------------------------------------------------------------------------

    @app.command("odom")
    def odom_cmd(
        scans: _ScansOption,
        out: _OutOption = None,
        scan_format: _ScanFormatOption = ScanFormat.CSV_FLOAT,
        a: _AOption = 1.0,
        b: _BOption = 20.0,
        window: _WindowOption = DEFAULT_WINDOW_W,
        guard: _GuardOption = DEFAULT_GUARD_PER_SIDE,
        estimator: _EstimatorOption = EstimatorKind.CELL_AVERAGING,
        os_rank: _OsRankOption = None,
        k: _KOption = None,
        gate: _GateOption = 2.0,
        max_iterations: Annotated[
            int, typer.Option("--max-iterations", help="ICP iteration cap.")
        ] = 50,
        dt: Annotated[float, typer.Option("--dt", help="Seconds between scans.")] = 0.25,
        workers: _WorkersOption = 1,
        fmt: _FormatOption = "text",
    ) -> None:
        """Chain ICP registrations into an estimated ``t,x,y,yaw`` trajectory.

        Exits 0 on success; 1 if a registration fails (the poses estimated
        up to that scan are still written) or on domain errors.
        """
        from bfar_radar.io import read_scan_directory, write_trajectory
        from bfar_radar.odometry import IcpConfig, chain_odometry

        _validate_fmt(fmt)
        _require_exists(scans)
        with _domain_errors():
            spec = _detector_spec(a, b, window, guard, estimator, os_rank, k)
            icp = IcpConfig(max_iterations=max_iterations, gate_m=gate)
            sequence = read_scan_directory(scans, scan_format)
            result = chain_odometry(
                sequence,
                spec,
                icp,
                timestamps=[i * dt for i in range(len(sequence))],
                workers=workers,
            )
            if out is not None:
                write_trajectory(result.trajectory, out)

        if fmt == "json":
            _print_json(
                {
                    "detector": spec.describe(),
                    "output": str(out) if out else None,
                    **result.to_dict(),
                }
            )
        else:
            typer.echo(f"Detector:  {spec.describe()}")
            typer.echo(f"Result:    {result.summary()}")
            if out is not None:
                typer.echo(f"Output:    {out}")

        raise typer.Exit(code=0 if result.ok else 1)

    # ---------------------------------------------------------------------------
    # eval
    # ---------------------------------------------------------------------------

    @app.command("eval")
    def eval_cmd(
        est: Annotated[
            Path, typer.Option("--est", help="Estimated trajectory CSV.", metavar="FILE")
        ],
        gt: _GtOption,
        lengths: _LengthsOption = "",
        kitti_lengths: _KittiLengthsOption = False,
        out: _OutOption = None,
        fmt: _FormatOption = "text",
    ) -> None:
        """KITTI relative errors and ATE (``transl_pct,rot_deg_per_100m,ate_m``).

        Exits 0 on success, 1 on mismatched or too-short trajectories.
        """
        from bfar_radar.io import read_trajectory, write_csv
        from bfar_radar.metrics import TrajectoryMetrics, evaluate_trajectory

        _validate_fmt(fmt)
        _require_exists(est)
        _require_exists(gt)
        chosen = _resolve_lengths(lengths, kitti_lengths)
        with _domain_errors():
            metrics = evaluate_trajectory(read_trajectory(est), read_trajectory(gt), chosen)
            if out is not None:
                write_csv(out, TrajectoryMetrics.HEADER, [metrics.as_row()])

        if fmt == "json":
            _print_json({"lengths_m": list(chosen), **metrics.to_dict()})
        else:
            typer.echo(f"Translation: {metrics.transl_pct:.4f} %")
            typer.echo(f"Rotation:    {metrics.rot_deg_per_100m:.4f} deg/100 m")
            typer.echo(f"ATE:         {metrics.ate_m:.4f} m")

    # ---------------------------------------------------------------------------
    # learn
    # ---------------------------------------------------------------------------

    @app.command("learn")
    def learn_cmd(
        scans: _ScansOption,
        gt: _GtOption,
        out: _OutOption = None,
        surface_out: Annotated[
            Path | None,
            typer.Option("--surface-out", help="Write pfa_ub,b,transl_pct here.", metavar="PATH"),
        ] = None,
        scan_format: _ScanFormatOption = ScanFormat.CSV_FLOAT,
        a_grid: Annotated[
            str, typer.Option("--a-grid", help="Comma-separated a values.", metavar="LIST")
        ] = "0,0.1,0.25,0.5,1,2,3",
        b_grid: Annotated[
            str, typer.Option("--b-grid", help="Comma-separated b values.", metavar="LIST")
        ] = "5,10,15,20,30,40,50,60",
        window: _WindowOption = DEFAULT_WINDOW_W,
        guard: _GuardOption = DEFAULT_GUARD_PER_SIDE,
        objective: Annotated[
            Objective,
            typer.Option("--objective", help="Selection objective.", case_sensitive=False),
        ] = Objective.TRANSLATION,
        lengths: _LengthsOption = "",
        kitti_lengths: _KittiLengthsOption = False,
        gate: _GateOption = 2.0,
        workers: _WorkersOption = 1,
        fmt: _FormatOption = "text",
    ) -> None:
        """Grid-search ``(a, b)`` on a training sequence.

        Exits 0 on success, 1 if every cell failed or on domain errors.
        """
        from bfar_radar.io import read_scan_directory, read_trajectory
        from bfar_radar.learning import grid_search
        from bfar_radar.odometry import IcpConfig
        from bfar_radar.params import DetectorParams

        _validate_fmt(fmt)
        _require_exists(scans)
        _require_exists(gt)
        a_values = _parse_floats(a_grid, "--a-grid")
        b_values = _parse_floats(b_grid, "--b-grid")
        chosen = _resolve_lengths(lengths, kitti_lengths)
        with _domain_errors():
            base = DetectorParams(1.0, 20.0, window_w=window, guard_per_side=guard)
            report = grid_search(
                read_scan_directory(scans, scan_format),
                read_trajectory(gt),
                a_values,
                b_values,
                base,
                objective,
                icp=IcpConfig(gate_m=gate),
                lengths=chosen,
                workers=workers,
            )
            if out is not None:
                report.write_csv(out)
            if surface_out is not None:
                report.write_surface_csv(surface_out)

        if fmt == "json":
            _print_json(report.to_dict())
        else:
            typer.echo(report.summary())
            for warning in report.warnings:
                typer.echo(f"  {warning}", err=True)

    # ---------------------------------------------------------------------------
    # sweep
    # ---------------------------------------------------------------------------

    @app.command("sweep")
    def sweep_cmd(
        scans: _ScansOption,
        gt: _GtOption,
        out: _OutOption = None,
        scan_format: _ScanFormatOption = ScanFormat.CSV_FLOAT,
        pfa_grid: Annotated[
            str, typer.Option("--pfa-grid", help="Comma-separated PFA values.", metavar="LIST")
        ] = "0.5,1e-1,1e-2,1e-3,1e-4,1e-5,1e-6,1e-8,1e-10,1e-12",
        window: _WindowOption = DEFAULT_WINDOW_W,
        guard: _GuardOption = DEFAULT_GUARD_PER_SIDE,
        lengths: _LengthsOption = "",
        kitti_lengths: _KittiLengthsOption = False,
        gate: _GateOption = 2.0,
        workers: _WorkersOption = 1,
        fmt: _FormatOption = "text",
    ) -> None:
        """CA-CFAR (b = 0) sensitivity sweep over false-alarm rates.

        Exits 0 on success, 1 on domain errors.
        """
        from bfar_radar.io import read_scan_directory, read_trajectory
        from bfar_radar.learning import SweepRow, sensitivity_sweep, write_sweep_csv
        from bfar_radar.odometry import IcpConfig
        from bfar_radar.params import DetectorParams

        _validate_fmt(fmt)
        _require_exists(scans)
        _require_exists(gt)
        pfas = _parse_floats(pfa_grid, "--pfa-grid")
        chosen = _resolve_lengths(lengths, kitti_lengths)
        with _domain_errors():
            base = DetectorParams(1.0, 20.0, window_w=window, guard_per_side=guard)
            rows = sensitivity_sweep(
                read_scan_directory(scans, scan_format),
                read_trajectory(gt),
                pfas,
                base,
                icp=IcpConfig(gate_m=gate),
                lengths=chosen,
                workers=workers,
            )
            if out is not None:
                write_sweep_csv(rows, out)

        if fmt == "json":
            _print_json({"rows": [dict(zip(SweepRow.HEADER, r.as_row())) for r in rows]})
        else:
            typer.echo(f"{'pfa':>8} {'a':>8} {'det/scan':>10} {'transl %':>9} {'ATE m':>8} status")
            for r in rows:
                typer.echo(
                    f"{r.pfa:>8.0e} {r.a:>8.4f} {r.detection_count_mean:>10.1f} "
                    f"{r.transl_pct:>9.3f} {r.ate_m:>8.3f} {r.status.value}"
                )

    _COMMAND_NAMES = (
        "simulate", "detect", "analyze", "mc-validate", "roc", "odom", "eval", "learn", "sweep"
    )

else:  # pragma: no cover
    # Fallbacks when Typer is not installed: keep simple type aliases so that
    # the module can be imported and type annotations remain usable.
    _FormatOption = str  # type: ignore[misc]
    _OutOption = Path  # type: ignore[misc]


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def main(argv: list[str] | None = None) -> int:
    """Entry point for the ``bfar`` command; returns the process exit code."""
    if not _TYPER_AVAILABLE:  # pragma: no cover
        sys.stderr.write(
            "Error: the bfar-radar CLI requires 'typer'.\n"
            "Install it with: pip install 'bfar-radar[cli]'\n"
        )
        return 2
    try:
        app(args=argv, prog_name="bfar")
    except SystemExit as exc:
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else 1
    return 0  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
