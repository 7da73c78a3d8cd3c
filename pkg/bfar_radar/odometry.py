"""
Scan-to-scan radar odometry with rigid 2-D ICP.

Consecutive detection clouds are registered with point-to-point ICP
(nearest-neighbour association behind a distance gate, closed-form SVD
rigid fit per iteration) and the relative transforms are chained from an
identity start pose. Each registration is initialised from the previous
relative transform (constant-velocity prior). A standalone registration
with no prior starts from a coarse yaw search instead of the identity.

Registration convention: :func:`icp_register` returns ``T`` such that
``target ≈ T.apply(source)``. In :func:`chain_point_clouds` the source is
cloud ``k`` and the target cloud ``k - 1``, so ``T`` is the motion of the
sensor from scan ``k - 1`` to scan ``k``.

Examples
--------
>>> from bfar_radar.odometry import IcpConfig, chain_odometry
>>> from bfar_radar.params import DetectorParams
>>> result = chain_odometry(scans, DetectorParams(scale_a=1.0, offset_b=20.0))
>>> result.summary()
'50 scans, 49 registrations, mean 412.3 detections/scan - ok'

Authors
-------
Chaitanya Kasaraneni
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial import cKDTree

from bfar_radar.detector import detect
from bfar_radar.errors import ParameterError, RegistrationError
from bfar_radar.params import DetectorSpec
from bfar_radar.scan import PolarScan
from bfar_radar.trajectory import Pose2D, Trajectory, Transform2D, between, compose

logger = logging.getLogger(__name__)

#: Nearest-neighbour association gate in metres.
DEFAULT_GATE_M = 2.0

#: Fewest correspondences a rigid fit is attempted with.
MIN_POINTS = 3

#: Yaw range (degrees, either side of zero) searched when ICP has no initial estimate.
DEFAULT_YAW_SEARCH_DEG = 20.0


@dataclass(frozen=True)
class IcpConfig:
    """ICP settings.

    Attributes
    ----------
    max_iterations:
        Upper bound on association/fit rounds.
    tolerance:
        Convergence threshold on the change of the estimate between rounds
        (metres for translation, radians for rotation).
    gate_m:
        Pairs farther apart than this are not associated.
    collinear_tolerance:
        A cloud whose covariance eigenvalue ratio falls below this is
        treated as collinear (rotation unobservable).
    max_points:
        Clouds larger than this are thinned by a fixed stride.
    yaw_search_deg:
        Half-width of the coarse yaw search run when no initial estimate
        is given; ``0`` disables the search.
    yaw_search_step_deg:
        Spacing of the searched yaws.
    yaw_search_candidates:
        Number of best-scoring seeds refined by full ICP.
    """

    max_iterations: int = 50
    tolerance: float = 1e-6
    gate_m: float = DEFAULT_GATE_M
    collinear_tolerance: float = 1e-6
    max_points: int = 5000
    yaw_search_deg: float = DEFAULT_YAW_SEARCH_DEG
    yaw_search_step_deg: float = 1.0
    yaw_search_candidates: int = 3

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ParameterError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not self.tolerance > 0:
            raise ParameterError(f"tolerance must be > 0, got {self.tolerance}")
        if not (math.isfinite(self.gate_m) and self.gate_m > 0):
            raise ParameterError(f"gate_m must be > 0, got {self.gate_m}")
        if self.collinear_tolerance < 0:
            raise ParameterError(
                f"collinear_tolerance must be >= 0, got {self.collinear_tolerance}"
            )
        if self.max_points < MIN_POINTS:
            raise ParameterError(f"max_points must be >= {MIN_POINTS}, got {self.max_points}")
        if not (math.isfinite(self.yaw_search_deg) and 0 <= self.yaw_search_deg <= 180):
            raise ParameterError(
                f"yaw_search_deg must be in [0, 180], got {self.yaw_search_deg}"
            )
        if not (math.isfinite(self.yaw_search_step_deg) and self.yaw_search_step_deg > 0):
            raise ParameterError(
                f"yaw_search_step_deg must be > 0, got {self.yaw_search_step_deg}"
            )
        if self.yaw_search_candidates < 1:
            raise ParameterError(
                f"yaw_search_candidates must be >= 1, got {self.yaw_search_candidates}"
            )


@dataclass(frozen=True)
class RegistrationResult:
    """Outcome of one ICP run."""

    transform: Transform2D
    rmse: float
    iterations: int
    converged: bool
    degenerate: bool = False
    correspondences: int = 0

    def __post_init__(self) -> None:
        if math.isnan(self.rmse) or self.rmse < 0:
            raise ParameterError(f"rmse must be >= 0, got {self.rmse}")


# ---------------------------------------------------------------------------
# ICP
# ---------------------------------------------------------------------------


def _as_xy(points: ArrayLike, name: str) -> NDArray[np.float64]:
    array = np.asarray(points, dtype=np.float64)
    if array.ndim != 2 or array.shape[1] < 2:
        raise ParameterError(f"{name} must be an (n, 2) or (n, 3) array, got shape {array.shape}")
    xy = array[:, :2]
    if not np.all(np.isfinite(xy)):
        raise ParameterError(f"{name} contains non-finite coordinates")
    return xy


def _cloud_xy(cloud: ArrayLike) -> NDArray[np.float64]:
    array = np.asarray(cloud, dtype=np.float64)
    if array.size == 0:
        return np.zeros((0, 2))
    return _as_xy(array, "cloud")


def _thin(points: NDArray[np.float64], max_points: int) -> NDArray[np.float64]:
    if points.shape[0] <= max_points:
        return points
    stride = math.ceil(points.shape[0] / max_points)
    return points[::stride]


def is_collinear(points: NDArray[np.float64], tolerance: float) -> bool:
    """``True`` when the smaller principal variance is negligible."""
    centred = points - points.mean(axis=0)
    eigenvalues = np.linalg.eigvalsh(centred.T @ centred)
    largest = float(eigenvalues[-1])
    return largest <= 0.0 or float(eigenvalues[0]) / largest < tolerance


def rigid_fit(source: NDArray[np.float64], target: NDArray[np.float64]) -> Transform2D:
    """Least-squares rigid transform mapping *source* onto *target* (paired rows)."""
    source_mean = source.mean(axis=0)
    target_mean = target.mean(axis=0)
    h = (source - source_mean).T @ (target - target_mean)
    u, _, vt = np.linalg.svd(h)
    rotation = vt.T @ u.T
    if np.linalg.det(rotation) < 0:
        vt[-1, :] *= -1
        rotation = vt.T @ u.T
    translation = target_mean - rotation @ source_mean
    return Transform2D.from_rotation(rotation, translation)


def _associate(
    tree: cKDTree, moved: NDArray[np.float64], gate: float
) -> tuple[NDArray[np.float64], NDArray[np.intp], NDArray[np.bool_]]:
    distances, indices = tree.query(moved, k=1, distance_upper_bound=gate)
    return distances, indices, np.isfinite(distances)


def _truncated_cost(tree: cKDTree, moved: NDArray[np.float64], gate: float) -> float:
    """Mean squared nearest-neighbour distance, each distance clipped at *gate*."""
    distances, _ = tree.query(moved, k=1, distance_upper_bound=gate)
    return float(np.mean(np.minimum(distances, gate) ** 2))


def _yaw_seeds(
    src: NDArray[np.float64],
    dst: NDArray[np.float64],
    tree: cKDTree,
    config: IcpConfig,
) -> list[Transform2D]:
    """Lowest-cost starting estimates over a grid of yaws.

    Each yaw is tried with zero translation and with the translation that
    maps the source centroid onto the target centroid.
    """
    step = math.radians(config.yaw_search_step_deg)
    count = int(math.floor(config.yaw_search_deg / config.yaw_search_step_deg + 1e-9))
    src_mean = src.mean(axis=0, keepdims=True)
    dst_mean = dst.mean(axis=0)
    scored: list[tuple[float, Transform2D]] = []
    for k in range(-count, count + 1):
        rotated = Transform2D(0.0, 0.0, k * step)
        shift = dst_mean - rotated.apply(src_mean)[0]
        for seed in (rotated, Transform2D(float(shift[0]), float(shift[1]), k * step)):
            scored.append((_truncated_cost(tree, seed.apply(src), config.gate_m), seed))
    scored.sort(key=lambda item: item[0])
    return [seed for _, seed in scored[: config.yaw_search_candidates]]


def _refine(
    src: NDArray[np.float64],
    dst: NDArray[np.float64],
    tree: cKDTree,
    config: IcpConfig,
    estimate: Transform2D,
) -> tuple[Transform2D, int, bool]:
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        _, indices, valid = _associate(tree, estimate.apply(src), config.gate_m)
        if int(valid.sum()) < MIN_POINTS:
            raise RegistrationError(
                f"Only {int(valid.sum())} correspondences within the "
                f"{config.gate_m:g} m gate (iteration {iterations})"
            )
        updated = rigid_fit(src[valid], dst[indices[valid]])
        step = between(estimate, updated)
        estimate = updated
        logger.debug(
            f"ICP iteration {iterations}: {int(valid.sum())} pairs, "
            f"step {step.translation_norm:.3g} m / {abs(step.dyaw):.3g} rad"
        )
        if step.translation_norm < config.tolerance and abs(step.dyaw) < config.tolerance:
            converged = True
            break
    return estimate, iterations, converged


def icp_register(
    source: ArrayLike,
    target: ArrayLike,
    config: IcpConfig | None = None,
    initial: Transform2D | None = None,
) -> RegistrationResult:
    """Register *source* onto *target* with point-to-point ICP.

    Parameters
    ----------
    source, target:
        ``(n, 2)`` clouds; extra columns (intensity) are ignored.
    config:
        ICP settings; defaults to :class:`IcpConfig`.
    initial:
        Starting estimate. When omitted, yaws within
        ``config.yaw_search_deg`` are scored by their gated point distance
        and the best few seeds are refined; the lowest-cost result wins.

    Returns
    -------
    RegistrationResult
        ``transform`` maps source points onto target points. For collinear
        input the identity is returned with ``converged=False`` and
        ``degenerate=True``.

    Raises
    ------
    RegistrationError
        If either cloud has fewer than three points or fewer than three
        pairs survive the gate.
    """
    config = config or IcpConfig()
    src = _thin(_as_xy(source, "source"), config.max_points)
    dst = _thin(_as_xy(target, "target"), config.max_points)
    if src.shape[0] < MIN_POINTS or dst.shape[0] < MIN_POINTS:
        raise RegistrationError(
            f"Registration needs >= {MIN_POINTS} points per cloud, "
            f"got {src.shape[0]} and {dst.shape[0]}"
        )

    tree = cKDTree(dst)
    if is_collinear(src, config.collinear_tolerance) or is_collinear(
        dst, config.collinear_tolerance
    ):
        distances, _ = tree.query(src, k=1)
        logger.warning("Degenerate (collinear) geometry - returning identity")
        return RegistrationResult(
            Transform2D.identity(),
            rmse=float(np.sqrt(np.mean(distances**2))),
            iterations=0,
            converged=False,
            degenerate=True,
        )

    if initial is not None:
        seeds = [initial]
    elif config.yaw_search_deg > 0:
        seeds = _yaw_seeds(src, dst, tree, config)
    else:
        seeds = [Transform2D.identity()]

    best: tuple[float, Transform2D, int, bool] | None = None
    error: RegistrationError | None = None
    for seed in seeds:
        try:
            estimate, iterations, converged = _refine(src, dst, tree, config, seed)
        except RegistrationError as exc:
            error = exc
            continue
        cost = _truncated_cost(tree, estimate.apply(src), config.gate_m)
        if best is None or cost < best[0]:
            best = (cost, estimate, iterations, converged)
    if best is None:
        raise error or RegistrationError("No starting estimate could be refined")
    _, estimate, iterations, converged = best

    distances, _, valid = _associate(tree, estimate.apply(src), config.gate_m)
    if int(valid.sum()) < MIN_POINTS:
        raise RegistrationError("Correspondences lost after the final update")
    rmse = float(np.sqrt(np.mean(distances[valid] ** 2)))
    if not converged:
        logger.warning(f"ICP did not converge in {config.max_iterations} iterations")
    return RegistrationResult(
        estimate,
        rmse=rmse,
        iterations=iterations,
        converged=converged,
        correspondences=int(valid.sum()),
    )


# ---------------------------------------------------------------------------
# Chaining
# ---------------------------------------------------------------------------


@dataclass
class OdometryResult:
    """Chained odometry over a scan sequence.

    ``trajectory`` covers the poses that could be estimated: all of them on
    success, or the prefix up to (excluding) ``failed_at`` on failure.
    """

    trajectory: Trajectory
    relative_transforms: list[Transform2D] = field(default_factory=list)
    registrations: list[RegistrationResult] = field(default_factory=list)
    detection_counts: list[int] = field(default_factory=list)
    failed_at: int | None = None
    failure_reason: str | None = None

    @property
    def ok(self) -> bool:
        return self.failed_at is None

    @property
    def mean_detections(self) -> float:
        return float(np.mean(self.detection_counts)) if self.detection_counts else 0.0

    def summary(self) -> str:
        status = "ok" if self.ok else f"FAILED at scan {self.failed_at}: {self.failure_reason}"
        return (
            f"{len(self.detection_counts)} scans, {len(self.registrations)} registrations, "
            f"mean {self.mean_detections:.1f} detections/scan - {status}"
        )

    def to_dict(self) -> dict[str, object]:
        return {
            "ok": self.ok,
            "poses": len(self.trajectory),
            "failed_at": self.failed_at,
            "failure_reason": self.failure_reason,
            "mean_detections": self.mean_detections,
            "detection_counts": list(self.detection_counts),
            "unconverged": sum(not r.converged for r in self.registrations),
        }


def chain_point_clouds(
    clouds: Sequence[ArrayLike],
    config: IcpConfig | None = None,
    timestamps: Sequence[float] | None = None,
) -> OdometryResult:
    """Register consecutive clouds and compose the relative transforms.

    Any registration failure stops the chain; ``failed_at`` is then the
    index of the first pose that could not be estimated.
    """
    if len(clouds) < 2:
        raise ParameterError(f"Odometry needs >= 2 scans, got {len(clouds)}")
    times = list(timestamps) if timestamps is not None else [float(k) for k in range(len(clouds))]
    if len(times) != len(clouds):
        raise ParameterError(f"{len(times)} timestamps for {len(clouds)} scans")
    config = config or IcpConfig()
    xy = [_cloud_xy(c) for c in clouds]
    counts = [int(c.shape[0]) for c in xy]

    pose = Transform2D.identity()
    poses = [Pose2D.from_transform(times[0], pose)]
    result = OdometryResult(Trajectory(poses), detection_counts=counts)
    prior = Transform2D.identity()

    for k in range(1, len(xy)):
        try:
            registration = icp_register(xy[k], xy[k - 1], config, initial=prior)
        except RegistrationError as exc:
            result.failed_at, result.failure_reason = k, str(exc)
            break
        if registration.degenerate:
            result.failed_at, result.failure_reason = k, "degenerate (collinear) geometry"
            break
        result.registrations.append(registration)
        result.relative_transforms.append(registration.transform)
        pose = compose(pose, registration.transform)
        poses.append(Pose2D.from_transform(times[k], pose))
        prior = registration.transform

    result.trajectory = Trajectory(poses)
    if result.ok:
        logger.info(f"Odometry: {result.summary()}")
    else:
        logger.error(f"Odometry: {result.summary()}")
    return result


def chain_odometry(
    scans: Sequence[PolarScan],
    detector: DetectorSpec,
    config: IcpConfig | None = None,
    timestamps: Sequence[float] | None = None,
    *,
    workers: int = 1,
) -> OdometryResult:
    """Detect every scan with *detector*, then :func:`chain_point_clouds`.

    Detection runs on *workers* threads; chaining is sequential.
    """
    if len(scans) < 2:
        raise ParameterError(f"Odometry needs >= 2 scans, got {len(scans)}")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            detections = list(pool.map(lambda scan: detect(scan, detector), scans))
    else:
        detections = [detect(scan, detector) for scan in scans]
    return chain_point_clouds([d.xy for d in detections], config, timestamps)
