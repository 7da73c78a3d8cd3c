"""
Tests for bfar_radar.trajectory.

Covers:
- angle normalisation into (-pi, pi]
- SE(2) compose / inverse / between identities and point application
- Pose2D validation
- Trajectory ordering, path lengths, re-anchoring and global transforms
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from bfar_radar.errors import ParameterError, TrajectoryError
from bfar_radar.trajectory import (
    Pose2D,
    Trajectory,
    Transform2D,
    between,
    compose,
    inverse,
    normalize_angle,
)

# ---------------------------------------------------------------------------
# Angles and transforms
# ---------------------------------------------------------------------------


class TestNormalizeAngle:
    @pytest.mark.parametrize(
        ("angle", "expected"),
        [(0.0, 0.0), (math.pi, math.pi), (-math.pi, math.pi), (7.0, 7.0 - 2 * math.pi)],
    )
    def test_values(self, angle, expected) -> None:
        assert normalize_angle(angle) == pytest.approx(expected)

    def test_range(self) -> None:
        for angle in np.linspace(-20, 20, 101):
            wrapped = normalize_angle(float(angle))
            assert -math.pi < wrapped <= math.pi


class TestTransform2D:
    def test_identity_apply(self) -> None:
        pts = np.array([[1.0, 2.0], [-3.0, 0.5]])
        np.testing.assert_allclose(Transform2D.identity().apply(pts), pts)

    def test_rotation_then_translation(self) -> None:
        t = Transform2D(1.0, 0.0, math.pi / 2)
        np.testing.assert_allclose(t.apply([[1.0, 0.0]]), [[1.0, 1.0]], atol=1e-12)

    def test_compose_order(self) -> None:
        a = Transform2D(1.0, 0.0, math.pi / 2)
        b = Transform2D(2.0, 0.0, 0.0)
        p = np.array([[0.5, -0.5]])
        np.testing.assert_allclose(compose(a, b).apply(p), a.apply(b.apply(p)), atol=1e-12)

    def test_inverse(self) -> None:
        t = Transform2D(3.0, -1.0, 0.7)
        assert compose(t, inverse(t)).is_close(Transform2D.identity())
        assert compose(inverse(t), t).is_close(Transform2D.identity())

    def test_between(self) -> None:
        a = Transform2D(1.0, 2.0, 0.3)
        b = Transform2D(-2.0, 0.5, -1.2)
        assert compose(a, between(a, b)).is_close(b)

    def test_matrix(self) -> None:
        t = Transform2D(1.0, 2.0, 0.4)
        pts = np.array([[0.3, -0.7]])
        homogeneous = t.matrix() @ np.array([0.3, -0.7, 1.0])
        np.testing.assert_allclose(homogeneous[:2], t.apply(pts)[0])

    def test_from_rotation(self) -> None:
        t = Transform2D(0.5, -0.5, 2.0)
        assert Transform2D.from_rotation(t.rotation, t.translation).is_close(t)

    def test_yaw_normalised(self) -> None:
        assert Transform2D(0.0, 0.0, 2 * math.pi + 0.1).dyaw == pytest.approx(0.1)

    def test_non_finite_rejected(self) -> None:
        with pytest.raises(ParameterError):
            Transform2D(float("nan"), 0.0, 0.0)

    def test_translation_norm(self) -> None:
        assert Transform2D(3.0, 4.0, 0.0).translation_norm == 5.0


# ---------------------------------------------------------------------------
# Poses and trajectories
# ---------------------------------------------------------------------------


def _line(n: int = 5, step: float = 1.0) -> Trajectory:
    return Trajectory([Pose2D(0.25 * k, step * k, 0.0, 0.0) for k in range(n)])


class TestPose2D:
    def test_yaw_normalised(self) -> None:
        assert Pose2D(0.0, 0.0, 0.0, -math.pi).yaw == pytest.approx(math.pi)

    def test_non_finite_rejected(self) -> None:
        with pytest.raises(ParameterError):
            Pose2D(0.0, float("inf"), 0.0, 0.0)

    def test_transform_round_trip(self) -> None:
        pose = Pose2D(1.0, 2.0, 3.0, 0.5)
        assert Pose2D.from_transform(1.0, pose.transform) == pose


class TestTrajectory:
    def test_sequence_protocol(self) -> None:
        traj = _line()
        assert len(traj) == 5
        assert traj[2].x == 2.0
        assert isinstance(traj[1:3], Trajectory)
        assert len(traj[1:3]) == 2
        assert [p.x for p in traj] == [0.0, 1.0, 2.0, 3.0, 4.0]

    def test_timestamps_must_increase(self) -> None:
        with pytest.raises(TrajectoryError, match="strictly increasing"):
            Trajectory([Pose2D(0.0, 0, 0, 0), Pose2D(0.0, 1, 0, 0)])

    def test_path_lengths(self) -> None:
        np.testing.assert_allclose(_line(step=2.0).path_lengths(), [0, 2, 4, 6, 8])
        assert _line(step=2.0).length == pytest.approx(8.0)

    def test_empty(self) -> None:
        empty = Trajectory([])
        assert empty.length == 0.0
        assert empty.xy.shape == (0, 2)

    def test_relative_to_first(self) -> None:
        traj = Trajectory(
            [Pose2D(0.0, 5.0, 5.0, math.pi / 2), Pose2D(1.0, 5.0, 6.0, math.pi / 2)]
        )
        rel = traj.relative_to_first()
        assert rel[0].transform.is_close(Transform2D.identity())
        assert rel[1].x == pytest.approx(1.0)
        assert rel[1].y == pytest.approx(0.0, abs=1e-12)

    def test_transformed(self) -> None:
        shifted = _line().transformed(Transform2D(0.0, 10.0, 0.0))
        np.testing.assert_allclose(shifted.xy[:, 1], np.full(5, 10.0))

    def test_from_arrays_and_transforms(self) -> None:
        traj = Trajectory.from_arrays([0, 1], [0, 1], [0, 0], [0, 0.1])
        again = Trajectory.from_transforms(list(traj.timestamps), traj.transforms())
        assert again == traj

    def test_from_transforms_length_mismatch(self) -> None:
        with pytest.raises(TrajectoryError):
            Trajectory.from_transforms([0.0], [Transform2D(), Transform2D()])

    def test_retimed(self) -> None:
        traj = _line(3).retimed([10.0, 11.0, 12.0])
        assert traj.timestamps.tolist() == [10.0, 11.0, 12.0]
        with pytest.raises(TrajectoryError):
            _line(3).retimed([1.0])
