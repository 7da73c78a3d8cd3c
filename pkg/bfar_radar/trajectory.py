"""
Planar poses, rigid SE(2) transforms, and trajectories.

A :class:`Transform2D` ``(dx, dy, dyaw)`` maps a point ``p`` to
``R(dyaw) @ p + (dx, dy)``. Composition follows the usual convention:
``compose(a, b)`` applies ``b`` first, then ``a``. A :class:`Pose2D` is a
timestamped transform from the sensor frame to the world frame.

Yaw is always normalised to ``(-pi, pi]``.

Examples
--------
>>> from bfar_radar.trajectory import Transform2D, compose, inverse
>>> step = Transform2D(1.0, 0.0, 0.1)
>>> identity = compose(step, inverse(step))
>>> round(identity.dx, 12), round(identity.dyaw, 12)
(0.0, 0.0)
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from bfar_radar.errors import ParameterError, TrajectoryError


def normalize_angle(angle: float) -> float:
    """Wrap *angle* (radians) into ``(-pi, pi]``."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


# ---------------------------------------------------------------------------
# SE(2)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Transform2D:
    """Rigid planar transform ``(dx, dy, dyaw)``."""

    dx: float = 0.0
    dy: float = 0.0
    dyaw: float = 0.0

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.dx, self.dy, self.dyaw)):
            raise ParameterError(f"Transform components must be finite: {self}")
        object.__setattr__(self, "dx", float(self.dx))
        object.__setattr__(self, "dy", float(self.dy))
        object.__setattr__(self, "dyaw", normalize_angle(float(self.dyaw)))

    @classmethod
    def identity(cls) -> Transform2D:
        return cls(0.0, 0.0, 0.0)

    @classmethod
    def from_rotation(
        cls, rotation: NDArray[np.float64], translation: ArrayLike
    ) -> Transform2D:
        t = np.asarray(translation, dtype=np.float64)
        return cls(float(t[0]), float(t[1]), math.atan2(rotation[1, 0], rotation[0, 0]))

    @property
    def rotation(self) -> NDArray[np.float64]:
        c, s = math.cos(self.dyaw), math.sin(self.dyaw)
        return np.array([[c, -s], [s, c]])

    @property
    def translation(self) -> NDArray[np.float64]:
        return np.array([self.dx, self.dy])

    @property
    def translation_norm(self) -> float:
        return math.hypot(self.dx, self.dy)

    def matrix(self) -> NDArray[np.float64]:
        """3x3 homogeneous matrix."""
        m = np.eye(3)
        m[:2, :2] = self.rotation
        m[:2, 2] = self.translation
        return m

    def apply(self, points: ArrayLike) -> NDArray[np.float64]:
        """Transform an ``(n, 2)`` array of points."""
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        return pts @ self.rotation.T + self.translation

    def is_close(self, other: Transform2D, atol: float = 1e-9) -> bool:
        return (
            abs(self.dx - other.dx) <= atol
            and abs(self.dy - other.dy) <= atol
            and abs(normalize_angle(self.dyaw - other.dyaw)) <= atol
        )


def compose(a: Transform2D, b: Transform2D) -> Transform2D:
    """Return ``a ∘ b`` (apply *b*, then *a*)."""
    c, s = math.cos(a.dyaw), math.sin(a.dyaw)
    return Transform2D(
        a.dx + c * b.dx - s * b.dy,
        a.dy + s * b.dx + c * b.dy,
        a.dyaw + b.dyaw,
    )


def inverse(t: Transform2D) -> Transform2D:
    c, s = math.cos(t.dyaw), math.sin(t.dyaw)
    return Transform2D(-(c * t.dx + s * t.dy), -(-s * t.dx + c * t.dy), -t.dyaw)


def between(a: Transform2D, b: Transform2D) -> Transform2D:
    """Relative transform ``inverse(a) ∘ b`` (``b`` expressed in ``a``'s frame)."""
    return compose(inverse(a), b)


# ---------------------------------------------------------------------------
# Poses and trajectories
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Pose2D:
    """Timestamped planar pose.

    Attributes
    ----------
    t:
        Timestamp in seconds.
    x, y:
        Position in metres.
    yaw:
        Heading in radians, normalised to ``(-pi, pi]``.
    """

    t: float
    x: float
    y: float
    yaw: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.t, self.x, self.y, self.yaw)):
            raise ParameterError(f"Pose components must be finite: {self}")
        object.__setattr__(self, "yaw", normalize_angle(float(self.yaw)))

    @classmethod
    def from_transform(cls, t: float, transform: Transform2D) -> Pose2D:
        return cls(t, transform.dx, transform.dy, transform.dyaw)

    @property
    def transform(self) -> Transform2D:
        return Transform2D(self.x, self.y, self.yaw)


class Trajectory(Sequence[Pose2D]):
    """Ordered, strictly time-increasing sequence of :class:`Pose2D`.

    Raises
    ------
    TrajectoryError
        If timestamps are not strictly increasing.
    """

    def __init__(self, poses: Sequence[Pose2D]) -> None:
        self._poses: tuple[Pose2D, ...] = tuple(poses)
        for prev, cur in zip(self._poses, self._poses[1:], strict=False):
            if not cur.t > prev.t:
                raise TrajectoryError(
                    f"Timestamps must be strictly increasing: {prev.t} then {cur.t}"
                )

    @classmethod
    def from_arrays(
        cls, t: ArrayLike, x: ArrayLike, y: ArrayLike, yaw: ArrayLike
    ) -> Trajectory:
        return cls(
            [
                Pose2D(float(ti), float(xi), float(yi), float(wi))
                for ti, xi, yi, wi in zip(
                    np.asarray(t), np.asarray(x), np.asarray(y), np.asarray(yaw), strict=True
                )
            ]
        )

    @classmethod
    def from_transforms(
        cls, timestamps: Sequence[float], transforms: Sequence[Transform2D]
    ) -> Trajectory:
        if len(timestamps) != len(transforms):
            raise TrajectoryError(
                f"{len(timestamps)} timestamps for {len(transforms)} transforms"
            )
        return cls([Pose2D.from_transform(t, tr) for t, tr in zip(timestamps, transforms)])

    def __len__(self) -> int:
        return len(self._poses)

    def __getitem__(self, index):  # type: ignore[no-untyped-def,override]
        if isinstance(index, slice):
            return Trajectory(self._poses[index])
        return self._poses[index]

    def __iter__(self) -> Iterator[Pose2D]:
        return iter(self._poses)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Trajectory) and self._poses == other._poses

    def __repr__(self) -> str:
        return f"Trajectory({len(self)} poses)"

    @property
    def timestamps(self) -> NDArray[np.float64]:
        return np.array([p.t for p in self._poses], dtype=np.float64)

    @property
    def xy(self) -> NDArray[np.float64]:
        return np.array([[p.x, p.y] for p in self._poses], dtype=np.float64).reshape(-1, 2)

    @property
    def yaws(self) -> NDArray[np.float64]:
        return np.array([p.yaw for p in self._poses], dtype=np.float64)

    def transforms(self) -> list[Transform2D]:
        return [p.transform for p in self._poses]

    def path_lengths(self) -> NDArray[np.float64]:
        """Cumulative travelled distance at each pose (starts at 0)."""
        if not self._poses:
            return np.zeros(0)
        steps = np.linalg.norm(np.diff(self.xy, axis=0), axis=1)
        return np.concatenate(([0.0], np.cumsum(steps)))

    @property
    def length(self) -> float:
        lengths = self.path_lengths()
        return float(lengths[-1]) if lengths.size else 0.0

    def relative_to_first(self) -> Trajectory:
        """Re-express every pose in the frame of the first pose."""
        if not self._poses:
            return self
        origin = self._poses[0].transform
        return Trajectory(
            [Pose2D.from_transform(p.t, between(origin, p.transform)) for p in self._poses]
        )

    def transformed(self, transform: Transform2D) -> Trajectory:
        """Apply a global rigid transform to every pose."""
        return Trajectory(
            [Pose2D.from_transform(p.t, compose(transform, p.transform)) for p in self._poses]
        )

    def retimed(self, timestamps: Sequence[float]) -> Trajectory:
        """Same pose sequence with new timestamps."""
        if len(timestamps) != len(self):
            raise TrajectoryError(f"{len(timestamps)} timestamps for {len(self)} poses")
        return Trajectory([Pose2D(t, p.x, p.y, p.yaw) for t, p in zip(timestamps, self._poses)])
