"""
Sliding-window target detection along each azimuth ray.

For every cell under test (CUT) ``X_j`` the detector

1. estimates the noise statistic ``Z_j`` from ``W/2`` reference cells on
   each side of the CUT, skipping ``guard_per_side`` guard cells next to it;
2. forms the affine threshold ``T_j = a * Z_j + b``;
3. flags the cell when ``X_j > T_j`` (strict).

``b = 0`` gives classical CA-CFAR (:func:`detect_ca_cfar`) and ``a = 0`` a
fixed-level detector (:func:`detect_fixed_level`); both share the same code
path, so the equivalences hold bit-for-bit.

Each profile is mirror-padded by ``W/2 + guard_per_side`` cells at both ends
(``numpy.pad(mode="reflect")``: the edge cell itself is not repeated), so
cells near the sensor and at maximum range get a full reference window.

Examples
--------
>>> import numpy as np
>>> from bfar_radar.detector import detect_profile
>>> from bfar_radar.params import DetectorParams
>>> params = DetectorParams(scale_a=1.0, offset_b=0.0, window_w=4, guard_per_side=1)
>>> detect_profile([1, 1, 1, 100, 1, 1, 1], params).nonzero()[0].tolist()
[3]

Authors
-------
Chaitanya Kasaraneni
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from bfar_radar.errors import ParameterError
from bfar_radar.estimators import CellAveraging, estimator_for
from bfar_radar.params import DetectorParams, DetectorSpec, KStrongestParams
from bfar_radar.protocol import NoiseEstimator
from bfar_radar.scan import DetectionSet, PolarScan

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NoiseEstimate:
    """Noise statistic ``Z`` for one cell under test.

    For the cell-averaging block ``z`` is the SUM of the ``W`` reference
    samples, not their mean.
    """

    z: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.z) and self.z >= 0):
            raise ParameterError(f"Noise estimate must be finite and >= 0, got {self.z}")


# ---------------------------------------------------------------------------
# Internals
# ---------------------------------------------------------------------------


def _as_matrix(data: PolarScan | ArrayLike) -> NDArray[np.float64]:
    if isinstance(data, PolarScan):
        return data.cells
    matrix = np.asarray(data, dtype=np.float64)
    if matrix.ndim == 1:
        matrix = matrix[None, :]
    if matrix.ndim != 2:
        raise ParameterError(f"Expected a profile or a 2-D matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)) or np.any(matrix < 0):
        raise ParameterError("Intensities must be finite and non-negative")
    return matrix


def _noise_matrix(
    cells: NDArray[np.float64],
    half_window: int,
    guard: int,
    estimator: NoiseEstimator,
) -> NDArray[np.float64]:
    pad = half_window + guard
    minimum = 2 * pad + 1
    if cells.shape[1] < minimum:
        raise ParameterError(
            f"Profile of {cells.shape[1]} cells is shorter than the minimum window "
            f"W + 2*guard + 1 = {minimum}"
        )
    padded = np.pad(cells, ((0, 0), (pad, pad)), mode="reflect")
    z = np.asarray(estimator(padded, half_window, guard), dtype=np.float64)
    if z.shape != cells.shape:
        raise ParameterError(
            f"Estimator {estimator!r} returned shape {z.shape}, expected {cells.shape}"
        )
    return z


def _exceeds(
    cells: NDArray[np.float64], z: NDArray[np.float64], scale_a: float, offset_b: float
) -> NDArray[np.bool_]:
    return cells > scale_a * z + offset_b


# ---------------------------------------------------------------------------
# Noise statistic and thresholds
# ---------------------------------------------------------------------------


def noise_levels(data: PolarScan | ArrayLike, params: DetectorParams) -> NDArray[np.float64]:
    """``Z`` for every cell of a scan, matrix, or single profile.

    Returns a matrix of the input's shape (a 1-D profile comes back as a
    ``(1, n)`` matrix).
    """
    cells = _as_matrix(data)
    return _noise_matrix(
        cells, params.half_window, params.guard_per_side, estimator_for(params)
    )


def thresholds(data: PolarScan | ArrayLike, params: DetectorParams) -> NDArray[np.float64]:
    """Threshold matrix ``T = a * Z + b``."""
    return params.scale_a * noise_levels(data, params) + params.offset_b


def estimate_noise(profile: ArrayLike, cut_index: int, params: DetectorParams) -> NoiseEstimate:
    """Noise statistic for the CUT at *cut_index* of a range profile.

    Raises
    ------
    ParameterError
        If the profile is shorter than ``W + 2 * guard_per_side + 1`` or the
        index is out of range.
    """
    cells = _as_matrix(np.asarray(profile, dtype=np.float64).reshape(-1))
    if not 0 <= cut_index < cells.shape[1]:
        raise ParameterError(f"cut_index {cut_index} outside profile of {cells.shape[1]} cells")
    z = noise_levels(cells, params)
    return NoiseEstimate(float(z[0, cut_index]))


# ---------------------------------------------------------------------------
# Detectors
# ---------------------------------------------------------------------------


def detect_matrix(cells: ArrayLike, params: DetectorParams) -> NDArray[np.bool_]:
    """Boolean mask for an ``(azimuths, range_bins)`` matrix; rows are independent."""
    matrix = _as_matrix(cells)
    z = _noise_matrix(matrix, params.half_window, params.guard_per_side, estimator_for(params))
    return _exceeds(matrix, z, params.scale_a, params.offset_b)


def detect_profile(profile: ArrayLike, params: DetectorParams) -> NDArray[np.bool_]:
    """Flag cell ``j`` iff ``X_j > a * Z_j + b``; same length as *profile*."""
    return detect_matrix(np.asarray(profile, dtype=np.float64).reshape(1, -1), params)[0]


def detect_scan(scan: PolarScan, params: DetectorParams) -> DetectionSet:
    """Apply :func:`detect_profile` to every azimuth and back-project the hits.

    Examples
    --------
    >>> detections = detect_scan(scan, DetectorParams(scale_a=1.0, offset_b=20.0))
    >>> detections.points[:, :2]     # x, y in the sensor frame
    """
    mask = detect_matrix(scan.cells, params)
    detections = DetectionSet.from_mask(scan, mask)
    logger.debug(f"{params.describe()}: {detections.count} detections")
    return detections


def detect_ca_cfar(
    scan: PolarScan, scale_a: float, window_w: int, guard_per_side: int = 2
) -> DetectionSet:
    """Classical cell-averaging CFAR: ``X > a * Z`` with ``Z`` the reference sum."""
    if not (math.isfinite(scale_a) and scale_a >= 0):
        raise ParameterError(f"scale_a must be finite and >= 0, got {scale_a}")
    if window_w < 2 or window_w % 2:
        raise ParameterError(f"window_w must be an even integer >= 2, got {window_w}")
    if guard_per_side < 0:
        raise ParameterError(f"guard_per_side must be >= 0, got {guard_per_side}")
    z = _noise_matrix(scan.cells, window_w // 2, guard_per_side, CellAveraging())
    return DetectionSet.from_mask(scan, _exceeds(scan.cells, z, scale_a, 0.0))


def detect_fixed_level(scan: PolarScan, level: float) -> DetectionSet:
    """Fixed-level detector: flag every cell with ``X > level``."""
    if not (math.isfinite(level) and level >= 0):
        raise ParameterError(f"level must be finite and >= 0, got {level}")
    return DetectionSet.from_mask(scan, scan.cells > level)


def k_strongest(scan: PolarScan, k: int) -> DetectionSet:
    """Keep the ``k`` highest-intensity cells of every azimuth.

    Ties are broken toward the lower range bin.

    Raises
    ------
    ParameterError
        If ``k`` is not in ``[1, num_range_bins]``.
    """
    if int(k) != k or not 1 <= k <= scan.num_range_bins:
        raise ParameterError(f"k must be in [1, {scan.num_range_bins}], got {k}")
    order = np.argsort(-scan.cells, axis=1, kind="stable")[:, :k]
    mask = np.zeros(scan.shape, dtype=bool)
    np.put_along_axis(mask, order, True, axis=1)
    return DetectionSet.from_mask(scan, mask)


def detect(scan: PolarScan, spec: DetectorSpec) -> DetectionSet:
    """Run whichever detector *spec* describes."""
    if isinstance(spec, KStrongestParams):
        return k_strongest(scan, spec.k)
    if isinstance(spec, DetectorParams):
        return detect_scan(scan, spec)
    raise TypeError(f"Unsupported detector specification: {type(spec).__name__}")
