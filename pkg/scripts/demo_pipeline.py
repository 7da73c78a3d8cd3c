#!/usr/bin/env python3
"""
demo_pipeline.py - local smoke test for the detection-to-odometry pipeline.

Run this script from the repo root after installing the package in dev mode:

    pip install -e ".[dev]"
    python scripts/demo_pipeline.py

Demonstrates four scenarios on a small synthetic drive:

    1. Closed-form PFA / PD / bound at one operating point
    2. BFAR vs CA-CFAR, fixed-level and k-strongest on one scan
    3. Scan and trajectory round-trip through the file formats
    4. ICP odometry with BFAR detections, scored with KITTI metrics

Exit code 0 = all scenarios completed.
Exit code 1 = something went wrong (error printed to stderr).
"""

from __future__ import annotations

import sys
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent
OUTPUTS = REPO_ROOT / "scripts" / "outputs"
OUTPUTS.mkdir(parents=True, exist_ok=True)

SEED = 42


def _separator(title: str) -> None:
    print(f"\n{'─' * 60}")
    print(f"  {title}")
    print(f"{'─' * 60}")


def run() -> int:
    try:
        import numpy as np

        from bfar_radar import (
            DetectorParams,
            build_benchmark,
            chain_odometry,
            detect_ca_cfar,
            detect_fixed_level,
            detect_scan,
            detection_stats,
            evaluate_trajectory,
            k_strongest,
            read_scan,
            read_trajectory,
            write_scan,
            write_trajectory,
        )
        from bfar_radar.simulator import SimConfig
    except ImportError as exc:
        print(
            f"ERROR: could not import bfar_radar - "
            f"did you run 'pip install -e .[dev]'?\n{exc}",
            file=sys.stderr,
        )
        return 1

    errors: list[str] = []
    params = DetectorParams(scale_a=1.0, offset_b=20.0, window_w=40, guard_per_side=2)

    # ------------------------------------------------------------------
    # Scenario 1 - Closed forms
    # ------------------------------------------------------------------
    _separator("1/4  Closed-form analysis")

    stats = detection_stats(a=1.0, b=20.0, mu=5.0, s=10.0, w=40)
    print(f"PFA {stats.pfa:.3g}   PD {stats.pd:.3g}   bound {stats.pfa_upper_bound:.3g}")
    if not stats.pfa <= stats.pfa_upper_bound:
        msg = "✗ PFA exceeds its bound"
        print(msg, file=sys.stderr)
        errors.append(msg)
    else:
        print("✓ PFA below the background-free bound")

    # ------------------------------------------------------------------
    # Scenario 2 - Detectors on one scan
    # ------------------------------------------------------------------
    _separator("2/4  Detectors on one scan")

    bench = build_benchmark(
        SEED,
        num_poses=12,
        num_landmarks=150,
        step_m=1.5,
        margin_m=50.0,
        config=SimConfig(num_azimuths=180, num_range_bins=160, range_resolution=0.5),
    )
    scan = bench.scans[0]
    counts = {
        "BFAR": detect_scan(scan, params).count,
        "CA-CFAR": detect_ca_cfar(scan, 1.0, 40).count,
        "fixed level": detect_fixed_level(scan, 20.0).count,
        "k-strongest": k_strongest(scan, 3).count,
        "truth cells": bench.landmark_cell_counts()[0],
    }
    for name, count in counts.items():
        print(f"  {name:<12} {count:>6}")

    ca_from_bfar = detect_scan(scan, DetectorParams(1.0, 0.0, window_w=40)).mask
    if not np.array_equal(ca_from_bfar, detect_ca_cfar(scan, 1.0, 40).mask):
        msg = "✗ BFAR with b = 0 differs from CA-CFAR"
        print(msg, file=sys.stderr)
        errors.append(msg)
    else:
        print("✓ BFAR with b = 0 matches CA-CFAR")

    # ------------------------------------------------------------------
    # Scenario 3 - File formats
    # ------------------------------------------------------------------
    _separator("3/4  File round-trip")

    csv_path = write_scan(scan, OUTPUTS / "demo_scan.csv")
    pgm_path = write_scan(scan, OUTPUTS / "demo_scan.pgm")
    traj_path = write_trajectory(bench.trajectory, OUTPUTS / "demo_trajectory.csv")

    if not read_scan(csv_path).same_content(scan):
        msg = "✗ csv_float scan changed on round-trip"
        print(msg, file=sys.stderr)
        errors.append(msg)
    else:
        print(f"✓ {csv_path.name} round-trips exactly")
    print(f"  {pgm_path.name}: {read_scan(pgm_path).shape} (8-bit, quantised)")
    if len(read_trajectory(traj_path)) != len(bench.trajectory):
        msg = "✗ trajectory lost poses on round-trip"
        print(msg, file=sys.stderr)
        errors.append(msg)
    else:
        print(f"✓ {traj_path.name} has {len(bench.trajectory)} poses")

    # ------------------------------------------------------------------
    # Scenario 4 - Odometry
    # ------------------------------------------------------------------
    _separator("4/4  ICP odometry")

    result = chain_odometry(bench.scans, params, timestamps=bench.trajectory.timestamps)
    print(result.summary())
    if result.ok:
        metrics = evaluate_trajectory(result.trajectory, bench.trajectory, lengths=(5.0, 10.0))
        print(
            f"  translation {metrics.transl_pct:.2f} %   rotation "
            f"{metrics.rot_deg_per_100m:.2f} deg/100 m   ATE {metrics.ate_m:.2f} m"
        )
    else:
        print("  (odometry lost track; metrics skipped)")

    # ------------------------------------------------------------------
    # Summary
    # ------------------------------------------------------------------
    _separator("Summary")
    print(f"Output files written to: {OUTPUTS}/\n")
    for f in sorted(OUTPUTS.glob("demo_*")):
        print(f"  {f.name}")

    if errors:
        print(f"\n{'─'*60}")
        print(f"FAILED - {len(errors)} error(s):")
        for e in errors:
            print(f"  {e}")
        return 1

    print("\n✓ All 4 pipeline scenarios passed.")
    return 0


if __name__ == "__main__":
    sys.exit(run())
