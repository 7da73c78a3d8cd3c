"""
The ``<name>.meta`` sidecar shared by every scan format.

Format::

    num_azimuths=400
    num_range_bins=512
    range_resolution=0.25
    # optional, only for non-uniform azimuth tables
    azimuth_offsets=0.0,0.0157,...

Lines starting with ``#`` and blank lines are ignored.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from bfar_radar.errors import ScanFormatError

logger = logging.getLogger(__name__)

_REQUIRED_KEYS = ("num_azimuths", "num_range_bins", "range_resolution")


def sidecar_path(path: Path) -> Path:
    """``scan_0001.csv`` -> ``scan_0001.meta``."""
    return path.with_suffix(".meta")


@dataclass(frozen=True)
class ScanMeta:
    """Geometry read from a sidecar."""

    num_azimuths: int
    num_range_bins: int
    range_resolution: float
    azimuth_offsets: NDArray[np.float64] | None = None


def read_meta(path: Path) -> ScanMeta:
    """Parse the sidecar belonging to scan file *path*.

    Raises
    ------
    FileNotFoundError
        If the sidecar is missing.
    ScanFormatError
        On malformed lines, missing keys, or invalid values.
    """
    meta_path = sidecar_path(path)
    if not meta_path.exists():
        raise FileNotFoundError(f"Scan sidecar not found: {meta_path}")

    values: dict[str, str] = {}
    for lineno, raw in enumerate(meta_path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ScanFormatError(f"{meta_path}:{lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = value

    missing = [k for k in _REQUIRED_KEYS if k not in values]
    if missing:
        raise ScanFormatError(f"{meta_path}: missing key(s) {', '.join(missing)}")

    try:
        num_azimuths = int(values["num_azimuths"])
        num_range_bins = int(values["num_range_bins"])
        resolution = float(values["range_resolution"])
    except ValueError as exc:
        raise ScanFormatError(f"{meta_path}: {exc}") from exc
    if num_azimuths < 1 or num_range_bins < 1 or not resolution > 0:
        raise ScanFormatError(
            f"{meta_path}: dimensions must be positive and range_resolution > 0"
        )

    offsets = None
    if "azimuth_offsets" in values:
        try:
            offsets = np.array(
                [float(v) for v in values["azimuth_offsets"].split(",")], dtype=np.float64
            )
        except ValueError as exc:
            raise ScanFormatError(f"{meta_path}: bad azimuth_offsets: {exc}") from exc
        if offsets.shape[0] != num_azimuths:
            raise ScanFormatError(
                f"{meta_path}: {offsets.shape[0]} azimuth_offsets for {num_azimuths} azimuths"
            )

    logger.debug(f"Read sidecar {meta_path}: {num_azimuths}x{num_range_bins} @ {resolution} m")
    return ScanMeta(num_azimuths, num_range_bins, resolution, offsets)


def write_meta(path: Path, meta: ScanMeta) -> None:
    """Write the sidecar belonging to scan file *path*."""
    lines = [
        f"num_azimuths={meta.num_azimuths}",
        f"num_range_bins={meta.num_range_bins}",
        f"range_resolution={meta.range_resolution!r}",
    ]
    if meta.azimuth_offsets is not None:
        lines.append("azimuth_offsets=" + ",".join(repr(float(v)) for v in meta.azimuth_offsets))
    sidecar_path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
