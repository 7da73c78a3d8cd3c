"""
Learning the BFAR threshold ``(a, b)`` from a training sequence.

:func:`grid_search` runs the full pipeline (detection, ICP odometry,
trajectory metrics) for every ``(a, b)`` of a grid and keeps the cell
with the smallest objective. :func:`sensitivity_sweep` runs the same
pipeline for pure CA-CFAR (``b = 0``) over a list of false-alarm rates,
which exposes how quickly odometry degrades outside a narrow PFA range.

Every cell sees the same scans, so the comparison between cells is
paired. Once learned, ``(a, b)`` stay fixed.

Examples
--------
>>> from bfar_radar.learning import grid_search
>>> report = grid_search(bench.scans, bench.trajectory)
>>> report.best.a, report.best.b
(1.0, 20.0)
>>> report.write_csv("grid.csv")
>>> report.write_surface_csv("surface.csv")   # pfa_ub, b, transl_pct

Authors
-------
Chaitanya Kasaraneni
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import TypeVar

from bfar_radar.analysis import pfa_upper_bound, solve_a_for_bound
from bfar_radar.enums import Objective, RunStatus
from bfar_radar.errors import LearningError, ParameterError, TrajectoryError
from bfar_radar.io import write_csv
from bfar_radar.metrics import DESK_LENGTHS_M, evaluate_trajectory
from bfar_radar.odometry import IcpConfig, OdometryResult, chain_odometry
from bfar_radar.params import DetectorParams
from bfar_radar.scan import PolarScan
from bfar_radar.trajectory import Trajectory

logger = logging.getLogger(__name__)

#: Scale grid searched by default.
DEFAULT_A_GRID: tuple[float, ...] = (0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 3.0)

#: Offset grid searched by default (intensity units).
DEFAULT_B_GRID: tuple[float, ...] = (5.0, 10.0, 15.0, 20.0, 30.0, 40.0, 50.0, 60.0)

#: False-alarm rates visited by :func:`sensitivity_sweep`.
DEFAULT_PFA_GRID: tuple[float, ...] = (0.5, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-8, 1e-10, 1e-12)

#: Threshold template used when none is given: W = 40, two guard cells per side.
DEFAULT_BASE_PARAMS = DetectorParams(scale_a=1.0, offset_b=20.0)

_NAN = float("nan")
_T = TypeVar("_T")
_R = TypeVar("_R")


def _map(func: Callable[[_T], _R], items: Sequence[_T], workers: int) -> list[_R]:
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, items))
    return [func(item) for item in items]


def _check_training_data(
    scans: Sequence[PolarScan], ground_truth: Trajectory, lengths: Sequence[float]
) -> None:
    if len(scans) != len(ground_truth):
        raise TrajectoryError(f"{len(scans)} scans for {len(ground_truth)} ground-truth poses")
    if len(scans) < 2:
        raise TrajectoryError(f"Training sequence needs >= 2 scans, got {len(scans)}")
    if ground_truth.length < max(lengths):
        raise TrajectoryError(
            f"Trajectory too short: ground-truth path is {ground_truth.length:.2f} m, "
            f"largest sub-sequence length is {max(lengths):g} m"
        )


@dataclass(frozen=True)
class _Outcome:
    status: RunStatus
    transl_pct: float = _NAN
    rot_deg: float = _NAN
    ate_m: float = _NAN
    detection_count_mean: float = _NAN
    message: str = ""


def _evaluate(
    scans: Sequence[PolarScan],
    ground_truth: Trajectory,
    params: DetectorParams,
    icp: IcpConfig,
    lengths: Sequence[float],
) -> _Outcome:
    odometry: OdometryResult = chain_odometry(
        scans, params, icp, timestamps=ground_truth.timestamps.tolist()
    )
    if not odometry.ok:
        logger.warning(f"{params.describe()}: {odometry.summary()}")
        return _Outcome(
            RunStatus.FAILED,
            detection_count_mean=odometry.mean_detections,
            message=odometry.failure_reason or "",
        )
    metrics = evaluate_trajectory(odometry.trajectory, ground_truth, tuple(lengths))
    logger.debug(
        f"{params.describe()}: {metrics.transl_pct:.3f}% "
        f"{metrics.rot_deg_per_100m:.3f} deg/100m ATE {metrics.ate_m:.3f} m"
    )
    return _Outcome(
        RunStatus.OK,
        metrics.transl_pct,
        metrics.rot_deg_per_100m,
        metrics.ate_m,
        odometry.mean_detections,
    )


# ---------------------------------------------------------------------------
# Grid search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridRow:
    """One ``(a, b)`` cell of the search."""

    a: float
    b: float
    pfa_ub: float
    transl_pct: float
    rot_deg: float
    ate_m: float
    detection_count_mean: float
    status: RunStatus
    message: str = ""

    HEADER = (
        "a", "b", "pfa_ub", "transl_pct", "rot_deg", "ate_m", "detection_count_mean", "status"
    )

    @property
    def ok(self) -> bool:
        return self.status is RunStatus.OK

    def as_row(self) -> tuple[object, ...]:
        return (
            self.a,
            self.b,
            self.pfa_ub,
            self.transl_pct,
            self.rot_deg,
            self.ate_m,
            self.detection_count_mean,
            self.status,
        )

    def objective_value(self, objective: Objective) -> float:
        return self.transl_pct if objective is Objective.TRANSLATION else self.ate_m


@dataclass
class GridSearchReport:
    """Every grid cell (ordered by ``a`` then ``b``) plus the selected cell."""

    rows: list[GridRow]
    best: GridRow
    objective: Objective
    window_w: int
    warnings: list[str] = field(default_factory=list)

    @property
    def failed(self) -> list[GridRow]:
        return [r for r in self.rows if r.status is RunStatus.FAILED]

    @property
    def invalid(self) -> list[GridRow]:
        return [r for r in self.rows if r.status is RunStatus.INVALID]

    def summary(self) -> str:
        return (
            f"{len(self.rows)} cells ({len(self.failed)} failed, {len(self.invalid)} invalid); "
            f"best a={self.best.a:g} b={self.best.b:g} "
            f"(PFAB {self.best.pfa_ub:.3g}): {self.best.transl_pct:.3f}% / "
            f"{self.best.rot_deg:.3f} deg/100m / ATE {self.best.ate_m:.3f} m"
        )

    def to_dict(self) -> dict[str, object]:
        return {
            "objective": self.objective.value,
            "window_w": self.window_w,
            "cells": len(self.rows),
            "failed": len(self.failed),
            "invalid": len(self.invalid),
            "best": {
                "a": self.best.a,
                "b": self.best.b,
                "pfa_ub": self.best.pfa_ub,
                "transl_pct": self.best.transl_pct,
                "rot_deg": self.best.rot_deg,
                "ate_m": self.best.ate_m,
                "detection_count_mean": self.best.detection_count_mean,
            },
        }

    def surface(self) -> list[tuple[float, float, float]]:
        """``(pfa_ub, b, transl_pct)`` for every cell, the translation-error surface."""
        return [(r.pfa_ub, r.b, r.transl_pct) for r in self.rows]

    def write_csv(self, path: str | Path) -> Path:
        return write_csv(path, GridRow.HEADER, (r.as_row() for r in self.rows))

    def write_surface_csv(self, path: str | Path) -> Path:
        return write_csv(path, ("pfa_ub", "b", "transl_pct"), self.surface())


def select_best(rows: Sequence[GridRow], objective: Objective) -> GridRow:
    """Smallest objective among OK rows; ties go to smaller ATE, then b, then a.

    Raises
    ------
    LearningError
        If no row is OK.
    """
    candidates = [r for r in rows if r.ok and not math.isnan(r.objective_value(objective))]
    if not candidates:
        raise LearningError(f"All {len(rows)} grid cells failed or were invalid")
    return min(candidates, key=lambda r: (r.objective_value(objective), r.ate_m, r.b, r.a))


def grid_search(
    scans: Sequence[PolarScan],
    ground_truth: Trajectory,
    a_grid: Sequence[float] = DEFAULT_A_GRID,
    b_grid: Sequence[float] = DEFAULT_B_GRID,
    base: DetectorParams = DEFAULT_BASE_PARAMS,
    objective: Objective | str = Objective.TRANSLATION,
    *,
    icp: IcpConfig | None = None,
    lengths: Sequence[float] = DESK_LENGTHS_M,
    workers: int = 1,
) -> GridSearchReport:
    """Run odometry for every ``(a, b)`` and select the best cell.

    Parameters
    ----------
    scans, ground_truth:
        Training sequence; one ground-truth pose per scan.
    a_grid, b_grid:
        Values to search. Cells with ``a = b = 0`` are recorded as invalid.
    base:
        Supplies the window, guard cells, and estimator; its own
        ``(a, b)`` are ignored.
    objective:
        ``translation`` (default) or ``ate``.
    workers:
        Thread pool size for running cells; the report order is fixed.

    Raises
    ------
    LearningError
        If every cell failed or was invalid, or a grid is empty.
    TrajectoryError
        If the training sequence is inconsistent or too short for *lengths*.
    """
    objective = Objective(objective)
    if not a_grid or not b_grid:
        raise LearningError("a_grid and b_grid must both be non-empty")
    _check_training_data(scans, ground_truth, lengths)
    icp = icp or IcpConfig()
    cells = sorted({(float(a), float(b)) for a in a_grid for b in b_grid})

    def run(cell: tuple[float, float]) -> GridRow:
        a, b = cell
        pfa_ub = pfa_upper_bound(a, base.window_w)
        try:
            params = base.with_threshold(a, b)
        except ParameterError as exc:
            return GridRow(a, b, pfa_ub, _NAN, _NAN, _NAN, _NAN, RunStatus.INVALID, str(exc))
        out = _evaluate(scans, ground_truth, params, icp, lengths)
        return GridRow(
            a,
            b,
            pfa_ub,
            out.transl_pct,
            out.rot_deg,
            out.ate_m,
            out.detection_count_mean,
            out.status,
            out.message,
        )

    rows = _map(run, cells, workers)
    best = select_best(rows, objective)
    failed = [r for r in rows if r.status is RunStatus.FAILED]
    report = GridSearchReport(
        rows=rows,
        best=best,
        objective=objective,
        window_w=base.window_w,
        warnings=[f"a={r.a:g} b={r.b:g}: {r.message}" for r in failed],
    )
    logger.info(f"Grid search: {report.summary()}")
    return report


# ---------------------------------------------------------------------------
# Sensitivity sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    """Pipeline metrics for one CA-CFAR false-alarm rate."""

    pfa: float
    a: float
    transl_pct: float
    rot_deg: float
    ate_m: float
    detection_count_mean: float
    detection_fraction: float
    detections_per_azimuth: float
    status: RunStatus
    message: str = ""

    HEADER = (
        "pfa",
        "a",
        "transl_pct",
        "rot_deg",
        "ate_m",
        "detection_count_mean",
        "detection_fraction",
        "detections_per_azimuth",
        "status",
    )

    def as_row(self) -> tuple[object, ...]:
        return (
            self.pfa,
            self.a,
            self.transl_pct,
            self.rot_deg,
            self.ate_m,
            self.detection_count_mean,
            self.detection_fraction,
            self.detections_per_azimuth,
            self.status,
        )


def sensitivity_sweep(
    scans: Sequence[PolarScan],
    ground_truth: Trajectory,
    pfa_grid: Sequence[float] = DEFAULT_PFA_GRID,
    base: DetectorParams = DEFAULT_BASE_PARAMS,
    *,
    icp: IcpConfig | None = None,
    lengths: Sequence[float] = DESK_LENGTHS_M,
    workers: int = 1,
) -> list[SweepRow]:
    """Run the pipeline at ``b = 0`` with ``a`` solved from each PFA.

    ``PFA = 1`` gives ``a = 0`` and therefore no threshold at all; that row
    is recorded as invalid.

    Raises
    ------
    ParameterError
        If a PFA lies outside ``(0, 1]``.
    """
    _check_training_data(scans, ground_truth, lengths)
    icp = icp or IcpConfig()
    scales = [(float(p), solve_a_for_bound(p, base.window_w)) for p in pfa_grid]
    num_azimuths = scans[0].num_azimuths
    num_cells = scans[0].num_azimuths * scans[0].num_range_bins

    def run(item: tuple[float, float]) -> SweepRow:
        pfa, a = item
        try:
            params = base.with_threshold(a, 0.0)
        except ParameterError as exc:
            return SweepRow(pfa, a, _NAN, _NAN, _NAN, _NAN, _NAN, _NAN, RunStatus.INVALID, str(exc))
        out = _evaluate(scans, ground_truth, params, icp, lengths)
        return SweepRow(
            pfa,
            a,
            out.transl_pct,
            out.rot_deg,
            out.ate_m,
            out.detection_count_mean,
            out.detection_count_mean / num_cells,
            out.detection_count_mean / num_azimuths,
            out.status,
            out.message,
        )

    rows = _map(run, scales, workers)
    logger.info(f"Sensitivity sweep: {len(rows)} PFA values")
    return rows


def write_sweep_csv(rows: Sequence[SweepRow], path: str | Path) -> Path:
    return write_csv(path, SweepRow.HEADER, (r.as_row() for r in rows))
