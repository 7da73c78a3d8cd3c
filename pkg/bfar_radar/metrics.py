"""
Trajectory error metrics: KITTI-style relative errors and ATE.

Both metrics compare an estimate against ground truth pose by pose, so the
two trajectories must have the same length and matching timestamps. Both
are invariant to a rigid transform applied to either trajectory as a whole.

Conventions
-----------
- ATE aligns each trajectory to its own first pose (no least-squares
  alignment) and takes the RMSE of the position differences over the
  remaining poses; the shared anchor pose is excluded.
- KITTI relative errors consider every start pose and every sub-sequence
  length ``L``; the end pose is the first one whose travelled ground-truth
  distance reaches ``L``. Translation errors are reported in percent of
  ``L`` and rotation errors in degrees per 100 m, averaged per length and
  then across lengths.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from bfar_radar.errors import TrajectoryError
from bfar_radar.trajectory import Trajectory, between

logger = logging.getLogger(__name__)

#: Desk-scale sub-sequence lengths in metres.
DESK_LENGTHS_M: tuple[float, ...] = (10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0)

#: Sub-sequence lengths of the standard KITTI odometry benchmark.
KITTI_LENGTHS_M: tuple[float, ...] = (100.0, 200.0, 300.0, 400.0, 500.0, 600.0, 700.0, 800.0)

#: Largest timestamp difference still treated as the same instant.
TIMESTAMP_TOLERANCE = 1e-9


def check_matched(estimate: Trajectory, ground_truth: Trajectory, min_poses: int = 2) -> None:
    """Raise :class:`TrajectoryError` unless the trajectories are pose-aligned."""
    if len(estimate) != len(ground_truth):
        raise TrajectoryError(
            f"Length mismatch: estimate has {len(estimate)} poses, "
            f"ground truth {len(ground_truth)}"
        )
    if len(estimate) < min_poses:
        raise TrajectoryError(f"Need at least {min_poses} poses, got {len(estimate)}")
    gap = np.abs(estimate.timestamps - ground_truth.timestamps)
    if gap.size and float(gap.max()) > TIMESTAMP_TOLERANCE:
        index = int(np.argmax(gap))
        raise TrajectoryError(
            f"Timestamp mismatch at pose {index}: {estimate[index].t} vs {ground_truth[index].t}"
        )


def ate_rmse(estimate: Trajectory, ground_truth: Trajectory) -> float:
    """Absolute trajectory error in metres after first-pose alignment.

    Examples
    --------
    >>> ate_rmse(gt, gt)
    0.0
    """
    check_matched(estimate, ground_truth)
    est = estimate.relative_to_first().xy[1:]
    ref = ground_truth.relative_to_first().xy[1:]
    return float(np.sqrt(np.mean(np.sum((est - ref) ** 2, axis=1))))


@dataclass(frozen=True)
class LengthErrors:
    """Averages over every sub-sequence of one length."""

    length_m: float
    translation_pct: float
    rotation_deg_per_100m: float
    segments: int


@dataclass(frozen=True)
class KittiErrors:
    """KITTI relative errors averaged across lengths."""

    translation_pct: float
    rotation_deg_per_100m: float
    per_length: tuple[LengthErrors, ...] = field(default_factory=tuple)

    @property
    def segments(self) -> int:
        return sum(p.segments for p in self.per_length)


def _segment_ends(distances: np.ndarray, length: float) -> list[tuple[int, int]]:
    pairs = []
    for start in range(len(distances)):
        reached = np.flatnonzero(distances[start:] - distances[start] >= length)
        if reached.size:
            pairs.append((start, start + int(reached[0])))
    return pairs


def kitti_relative_errors(
    estimate: Trajectory,
    ground_truth: Trajectory,
    lengths: tuple[float, ...] | list[float] = DESK_LENGTHS_M,
) -> KittiErrors:
    """Average relative translation (%) and rotation (deg/100 m) errors.

    Raises
    ------
    TrajectoryError
        If the trajectories are mismatched, *lengths* is empty, or the
        ground-truth path is shorter than the largest length.
    """
    check_matched(estimate, ground_truth)
    if not lengths or any(not (math.isfinite(L) and L > 0) for L in lengths):
        raise TrajectoryError(f"lengths must be positive, got {list(lengths)}")
    distances = ground_truth.path_lengths()
    if distances[-1] < max(lengths):
        raise TrajectoryError(
            f"Trajectory too short: ground-truth path is {distances[-1]:.2f} m, "
            f"largest sub-sequence length is {max(lengths):g} m"
        )

    est = estimate.transforms()
    ref = ground_truth.transforms()
    per_length = []
    for length in lengths:
        t_errors, r_errors = [], []
        for first, last in _segment_ends(distances, length):
            error = between(between(est[first], est[last]), between(ref[first], ref[last]))
            t_errors.append(error.translation_norm / length * 100.0)
            r_errors.append(math.degrees(abs(error.dyaw)) / length * 100.0)
        per_length.append(
            LengthErrors(
                float(length), float(np.mean(t_errors)), float(np.mean(r_errors)), len(t_errors)
            )
        )
        logger.debug(f"L={length:g} m: {len(t_errors)} segments")

    return KittiErrors(
        translation_pct=float(np.mean([p.translation_pct for p in per_length])),
        rotation_deg_per_100m=float(np.mean([p.rotation_deg_per_100m for p in per_length])),
        per_length=tuple(per_length),
    )


@dataclass(frozen=True)
class TrajectoryMetrics:
    """The ``eval`` row: KITTI errors plus ATE."""

    transl_pct: float
    rot_deg_per_100m: float
    ate_m: float
    kitti: KittiErrors | None = None

    HEADER = ("transl_pct", "rot_deg_per_100m", "ate_m")

    def as_row(self) -> tuple[float, float, float]:
        return (self.transl_pct, self.rot_deg_per_100m, self.ate_m)

    def to_dict(self) -> dict[str, float]:
        return dict(zip(self.HEADER, self.as_row()))


def evaluate_trajectory(
    estimate: Trajectory,
    ground_truth: Trajectory,
    lengths: tuple[float, ...] | list[float] = DESK_LENGTHS_M,
) -> TrajectoryMetrics:
    kitti = kitti_relative_errors(estimate, ground_truth, lengths)
    return TrajectoryMetrics(
        transl_pct=kitti.translation_pct,
        rot_deg_per_100m=kitti.rotation_deg_per_100m,
        ate_m=ate_rmse(estimate, ground_truth),
        kitti=kitti,
    )
