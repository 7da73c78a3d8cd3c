"""
Polar scan containers shared by every bfar-radar module.

A spinning FMCW radar returns one range profile per azimuth. After the
square-law detector each sample is a non-negative power reading, so a scan
is an ``azimuths x range_bins`` matrix of real intensities plus the geometry
needed to place each cell in the sensor frame.

Cell geometry
-------------
Cell ``(i, j)`` is centred at range ``(j + 0.5) * range_resolution`` and
bearing ``azimuth_offsets[i]``. The half-bin offset keeps bin 0 away from
the sensor origin. Azimuths are uniformly spaced over a full turn unless an
explicit offsets table is supplied.

Examples
--------
>>> import numpy as np
>>> from bfar_radar.scan import PolarScan, polar_to_cartesian
>>> scan = PolarScan(np.ones((4, 8)), range_resolution=0.25)
>>> scan.num_azimuths, scan.num_range_bins
(4, 8)
>>> points = polar_to_cartesian(scan, scan.cells > 0)
>>> points.shape
(32, 3)

Authors
-------
Chaitanya Kasaraneni
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from bfar_radar.errors import ParameterError

logger = logging.getLogger(__name__)

#: Default bound on the relative step of a noise field between adjacent cells.
DEFAULT_MAX_RELATIVE_STEP = 0.05


def uniform_azimuths(num_azimuths: int) -> NDArray[np.float64]:
    """Return ``num_azimuths`` bearings evenly spaced over ``[0, 2*pi)``."""
    return np.arange(num_azimuths, dtype=np.float64) * (2.0 * math.pi / num_azimuths)


def _frozen(array: NDArray[np.generic]) -> NDArray[np.generic]:
    array.setflags(write=False)
    return array


# ---------------------------------------------------------------------------
# PolarScan
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PolarScan:
    """Azimuth x range matrix of square-law intensity samples.

    Attributes
    ----------
    cells:
        ``(num_azimuths, num_range_bins)`` float64 matrix, azimuth-major.
        Integer input is promoted to float. Stored read-only.
    range_resolution:
        Metres per range bin, strictly positive.
    azimuth_offsets:
        Bearing in radians for each azimuth row. ``None`` on input means
        uniform spacing over a full turn.

    Raises
    ------
    ParameterError
        If the matrix is not 2-D, is empty, holds negative or non-finite
        values, or if the resolution or offsets table is invalid.
    """

    cells: NDArray[np.float64]
    range_resolution: float
    azimuth_offsets: NDArray[np.float64] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        cells = np.array(self.cells, dtype=np.float64, copy=True)
        if cells.ndim != 2 or cells.shape[0] < 1 or cells.shape[1] < 1:
            raise ParameterError(
                f"Scan cells must be a non-empty 2-D matrix, got shape {cells.shape}"
            )
        if not np.all(np.isfinite(cells)):
            raise ParameterError("Scan cells must be finite")
        if np.any(cells < 0):
            raise ParameterError("Scan intensities must be non-negative")
        if not (math.isfinite(self.range_resolution) and self.range_resolution > 0):
            raise ParameterError(f"range_resolution must be > 0, got {self.range_resolution}")

        if self.azimuth_offsets is None:
            offsets = uniform_azimuths(cells.shape[0])
        else:
            offsets = np.array(self.azimuth_offsets, dtype=np.float64, copy=True).reshape(-1)
            if offsets.shape[0] != cells.shape[0]:
                raise ParameterError(
                    f"azimuth_offsets has {offsets.shape[0]} entries for "
                    f"{cells.shape[0]} azimuths"
                )
            if not np.all(np.isfinite(offsets)):
                raise ParameterError("azimuth_offsets must be finite")

        object.__setattr__(self, "cells", _frozen(cells))
        object.__setattr__(self, "range_resolution", float(self.range_resolution))
        object.__setattr__(self, "azimuth_offsets", _frozen(offsets))

    @property
    def num_azimuths(self) -> int:
        return int(self.cells.shape[0])

    @property
    def num_range_bins(self) -> int:
        return int(self.cells.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.num_azimuths, self.num_range_bins)

    @property
    def has_uniform_azimuths(self) -> bool:
        """``True`` when the offsets equal the default uniform table exactly."""
        return bool(np.array_equal(self.azimuth_offsets, uniform_azimuths(self.num_azimuths)))

    @property
    def max_range(self) -> float:
        """Far edge of the last range bin in metres."""
        return self.num_range_bins * self.range_resolution

    def range_centres(self) -> NDArray[np.float64]:
        """Range in metres of each bin centre."""
        return (np.arange(self.num_range_bins, dtype=np.float64) + 0.5) * self.range_resolution

    def with_cells(self, cells: ArrayLike) -> PolarScan:
        """Return a scan with the same geometry and new intensities."""
        return PolarScan(
            np.asarray(cells, dtype=np.float64),
            range_resolution=self.range_resolution,
            azimuth_offsets=self.azimuth_offsets,
        )

    def scaled(self, factor: float) -> PolarScan:
        """Return the scan with every intensity multiplied by *factor* (> 0)."""
        if not factor > 0:
            raise ParameterError(f"Scale factor must be > 0, got {factor}")
        return self.with_cells(self.cells * factor)

    def same_content(self, other: PolarScan) -> bool:
        """Bitwise comparison of cells, resolution, and azimuth table."""
        return (
            self.range_resolution == other.range_resolution
            and np.array_equal(self.cells, other.cells)
            and np.array_equal(self.azimuth_offsets, other.azimuth_offsets)
        )


# ---------------------------------------------------------------------------
# DetectionSet
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DetectionSet:
    """Detector output: a per-cell mask plus the matching point cloud.

    Attributes
    ----------
    mask:
        Boolean matrix congruent with the source scan.
    points:
        ``(n, 3)`` array of ``(x, y, intensity)`` in the sensor frame, one
        row per true mask cell in azimuth-major order.
    """

    mask: NDArray[np.bool_]
    points: NDArray[np.float64]

    def __post_init__(self) -> None:
        mask = np.array(self.mask, dtype=bool, copy=True)
        points = np.array(self.points, dtype=np.float64, copy=True).reshape(-1, 3)
        if mask.ndim != 2:
            raise ParameterError(f"Detection mask must be 2-D, got shape {mask.shape}")
        if points.shape[0] != int(mask.sum()):
            raise ParameterError(
                f"Point count {points.shape[0]} does not match {int(mask.sum())} mask cells"
            )
        object.__setattr__(self, "mask", _frozen(mask))
        object.__setattr__(self, "points", _frozen(points))

    @classmethod
    def from_mask(cls, scan: PolarScan, mask: ArrayLike) -> DetectionSet:
        """Build a detection set by back-projecting *mask* through *scan*."""
        mask_arr = np.asarray(mask, dtype=bool)
        return cls(mask_arr, polar_to_cartesian(scan, mask_arr))

    @property
    def count(self) -> int:
        return int(self.points.shape[0])

    @property
    def xy(self) -> NDArray[np.float64]:
        """``(n, 2)`` Cartesian coordinates."""
        return self.points[:, :2]

    def __len__(self) -> int:
        return self.count


# ---------------------------------------------------------------------------
# NoiseModel
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NoiseModel:
    """Background power and target SNR for simulation and analysis.

    Attributes
    ----------
    mu:
        Clutter-plus-thermal power ``mu > 0``; a scalar or an
        ``(azimuths, range_bins)`` field.
    snr_s:
        Average target SNR ``S >= 0``.
    max_relative_step:
        Largest allowed ``|mu[k+1] - mu[k]| / mu[k]`` between adjacent cells
        along either axis of a field.

    Raises
    ------
    ParameterError
        If ``mu`` is not strictly positive everywhere, ``snr_s`` is negative,
        or the field changes faster than ``max_relative_step``.
    """

    mu: float | NDArray[np.float64]
    snr_s: float = 0.0
    max_relative_step: float = DEFAULT_MAX_RELATIVE_STEP

    def __post_init__(self) -> None:
        mu = np.array(self.mu, dtype=np.float64, copy=True)
        if mu.ndim not in (0, 2):
            raise ParameterError(f"mu must be a scalar or a 2-D field, got ndim={mu.ndim}")
        if not np.all(np.isfinite(mu)) or np.any(mu <= 0):
            raise ParameterError("mu must be finite and > 0 everywhere")
        if not (math.isfinite(self.snr_s) and self.snr_s >= 0):
            raise ParameterError(f"snr_s must be >= 0, got {self.snr_s}")
        if mu.ndim == 2:
            step = max(_max_relative_step(mu, axis=0), _max_relative_step(mu, axis=1))
            if step > self.max_relative_step:
                raise ParameterError(
                    f"mu field is not smooth: relative step {step:.4f} exceeds "
                    f"{self.max_relative_step:.4f}"
                )
            object.__setattr__(self, "mu", _frozen(mu))
        else:
            object.__setattr__(self, "mu", float(mu))

    @property
    def is_field(self) -> bool:
        return isinstance(self.mu, np.ndarray)

    def mu_matrix(self, shape: tuple[int, int]) -> NDArray[np.float64]:
        """Return ``mu`` broadcast to *shape*."""
        if isinstance(self.mu, np.ndarray):
            if self.mu.shape != shape:
                raise ParameterError(f"mu field shape {self.mu.shape} does not match {shape}")
            return self.mu
        return np.full(shape, self.mu, dtype=np.float64)


def _max_relative_step(mu: NDArray[np.float64], axis: int) -> float:
    if mu.shape[axis] < 2:
        return 0.0
    diffs = np.abs(np.diff(mu, axis=axis))
    base = np.delete(mu, -1, axis=axis)
    return float(np.max(diffs / base))


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------


def polar_to_cartesian(scan: PolarScan, mask: ArrayLike) -> NDArray[np.float64]:
    """Back-project flagged cells into sensor-frame ``(x, y, intensity)`` points.

    Cell ``(i, j)`` maps to range ``r = (j + 0.5) * range_resolution`` and
    bearing ``theta = azimuth_offsets[i]``; ``x = r cos theta``,
    ``y = r sin theta``. Points come out in azimuth-major order.

    Parameters
    ----------
    scan:
        Source scan supplying geometry and intensities.
    mask:
        Boolean matrix congruent with ``scan.cells``.

    Raises
    ------
    ParameterError
        If *mask* does not have the scan's shape.
    """
    mask_arr = np.asarray(mask, dtype=bool)
    if mask_arr.shape != scan.shape:
        raise ParameterError(f"Mask shape {mask_arr.shape} does not match scan shape {scan.shape}")
    rows, cols = np.nonzero(mask_arr)
    ranges = (cols + 0.5) * scan.range_resolution
    bearings = scan.azimuth_offsets[rows]
    return np.column_stack(
        (ranges * np.cos(bearings), ranges * np.sin(bearings), scan.cells[rows, cols])
    )


def cartesian_to_polar(
    scan: PolarScan, x: ArrayLike, y: ArrayLike
) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    """Map sensor-frame coordinates back to ``(azimuth_index, range_bin)``.

    The azimuth index is the row whose bearing is angularly closest; the
    range bin is ``floor(r / range_resolution)``. Inverse of
    :func:`polar_to_cartesian` on every cell centre.
    """
    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    ranges = np.hypot(xs, ys)
    bearings = np.arctan2(ys, xs)
    bins = np.floor(ranges / scan.range_resolution).astype(np.int64)
    # wrapped angular distance to every row, nearest wins
    delta = np.angle(np.exp(1j * (bearings[..., None] - scan.azimuth_offsets)))
    rows = np.argmin(np.abs(delta), axis=-1).astype(np.int64)
    return rows, bins
