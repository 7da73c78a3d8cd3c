"""
Reading and writing scans, point clouds, trajectories, and landmark tables.

Scan files are dispatched through a small codec registry keyed by format
name. The two built-in formats are ``csv_float`` and ``pgm8``; both store
geometry in a ``<name>.meta`` sidecar next to the payload.

Tabular files are plain CSV with a one-line header:

- point cloud - ``x,y,intensity``
- trajectory  - ``t,x,y,yaw``
- landmarks   - ``x,y,snr``

Examples
--------
>>> from bfar_radar.io import read_scan, write_scan
>>> write_scan(scan, "scan_0000.csv", "csv_float")
>>> read_scan("scan_0000.csv", "csv_float").same_content(scan)
True
>>>
>>> # Register a custom format
>>> register_codec("npy", MyNpyCodec())
>>> write_scan(scan, "scan_0000.npy", "npy")

Authors
-------
Chaitanya Kasaraneni
"""

from __future__ import annotations

import csv
import logging
import math
from collections.abc import Iterable, Sequence
from enum import Enum
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from bfar_radar.enums import ScanFormat
from bfar_radar.errors import ParameterError, ScanFormatError
from bfar_radar.formats.csv_float import CsvFloatCodec
from bfar_radar.formats.pgm8 import Pgm8Codec
from bfar_radar.formats.sidecar import ScanMeta, read_meta, write_meta
from bfar_radar.protocol import ScanCodec
from bfar_radar.scan import PolarScan
from bfar_radar.trajectory import Pose2D, Trajectory

logger = logging.getLogger(__name__)

#: File stem pattern used by scan directories.
SCAN_STEM = "scan_{index:04d}"

POINTS_HEADER = ("x", "y", "intensity")
TRAJECTORY_HEADER = ("t", "x", "y", "yaw")
LANDMARKS_HEADER = ("x", "y", "snr")

# Process-global, like any import-time plugin table: register at startup.
_CODECS: dict[str, ScanCodec] = {
    ScanFormat.CSV_FLOAT.value: CsvFloatCodec(),
    ScanFormat.PGM8.value: Pgm8Codec(),
}


# ---------------------------------------------------------------------------
# Codec registry
# ---------------------------------------------------------------------------


def register_codec(name: str, codec: ScanCodec) -> None:
    """Register (or replace) the codec used for format *name*.

    Raises
    ------
    TypeError
        If *codec* does not satisfy :class:`~bfar_radar.protocol.ScanCodec`.
    """
    if not isinstance(codec, ScanCodec):
        raise TypeError(f"{type(codec).__name__} does not implement the ScanCodec protocol")
    _CODECS[name] = codec
    logger.debug(f"Registered scan codec {type(codec).__name__!r} for format {name!r}.")


def get_codec(fmt: ScanFormat | str) -> ScanCodec:
    name = fmt.value if isinstance(fmt, ScanFormat) else str(fmt)
    try:
        return _CODECS[name]
    except KeyError:
        known = ", ".join(sorted(_CODECS))
        raise ParameterError(f"Unknown scan format {name!r}. Known formats: {known}") from None


def available_formats() -> list[str]:
    return sorted(_CODECS)


def format_for_path(path: str | Path) -> str:
    """Guess the format name from the file extension."""
    suffix = Path(path).suffix.lower()
    for name, codec in _CODECS.items():
        if codec.extension == suffix:
            return name
    raise ParameterError(f"Cannot infer scan format from extension {suffix!r}")


# ---------------------------------------------------------------------------
# Scans
# ---------------------------------------------------------------------------


def read_scan(path: str | Path, fmt: ScanFormat | str | None = None) -> PolarScan:
    """Read one scan and its sidecar.

    Parameters
    ----------
    path:
        Payload file (``.csv`` or ``.pgm`` for the built-in formats).
    fmt:
        Format name. Inferred from the extension when omitted.

    Raises
    ------
    FileNotFoundError
        If the payload or its sidecar does not exist.
    ScanFormatError
        On malformed headers, dimension mismatches, or negative CSV values.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Scan file not found: {path}")
    codec = get_codec(fmt if fmt is not None else format_for_path(path))

    meta = read_meta(path)
    cells = codec.read_cells(path, meta)
    try:
        scan = PolarScan(cells, meta.range_resolution, meta.azimuth_offsets)
    except ParameterError as exc:
        raise ScanFormatError(f"{path}: {exc}") from exc
    logger.info(f"Read scan {path} ({scan.num_azimuths}x{scan.num_range_bins})")
    return scan


def write_scan(scan: PolarScan, path: str | Path, fmt: ScanFormat | str | None = None) -> Path:
    """Write *scan* and its sidecar; return the payload path.

    ``pgm8`` output is quantised: values saturate at 255 and are truncated
    toward zero. ``csv_float`` output is lossless.
    """
    path = Path(path)
    codec = get_codec(fmt if fmt is not None else format_for_path(path))
    offsets = None if scan.has_uniform_azimuths else scan.azimuth_offsets
    meta = ScanMeta(scan.num_azimuths, scan.num_range_bins, scan.range_resolution, offsets)

    codec.write_cells(scan.cells, path)
    write_meta(path, meta)
    logger.info(f"Wrote scan {path}")
    return path


def scan_directory_paths(directory: str | Path, fmt: ScanFormat | str) -> list[Path]:
    """Scan payload files in *directory* for *fmt*, in sequence order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"Scan directory not found: {directory}")
    ext = get_codec(fmt).extension
    return sorted(p for p in directory.glob(f"scan_*{ext}") if p.is_file())


def read_scan_directory(directory: str | Path, fmt: ScanFormat | str) -> list[PolarScan]:
    """Read every ``scan_NNNN.<ext>`` file in *directory*, sorted by name.

    Raises
    ------
    FileNotFoundError
        If the directory is missing or holds no scans of the format.
    """
    paths = scan_directory_paths(directory, fmt)
    if not paths:
        raise FileNotFoundError(f"No {fmt} scans found in {directory}")
    return [read_scan(p, fmt) for p in paths]


def write_scan_directory(
    scans: Sequence[PolarScan], directory: str | Path, fmt: ScanFormat | str
) -> list[Path]:
    """Write *scans* as ``scan_0000.<ext>``, ``scan_0001.<ext>``, ..."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    ext = get_codec(fmt).extension
    return [
        write_scan(scan, directory / f"{SCAN_STEM.format(index=i)}{ext}", fmt)
        for i, scan in enumerate(scans)
    ]


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------


def _cell(value: object) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> Path:
    """Write a header plus rows; floats use their shortest round-trip form."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def _write_table(path: Path, header: Sequence[str], rows: Iterable[Sequence[float]]) -> None:
    write_csv(path, header, ([float(v) for v in row] for row in rows))


def _read_table(path: Path, header: Sequence[str]) -> NDArray[np.float64]:
    if not path.exists():
        raise FileNotFoundError(f"File not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        found = [h.strip() for h in next(reader, [])]
        if found != list(header):
            raise ScanFormatError(f"{path}: expected header {','.join(header)}, got {found}")
        rows: list[list[float]] = []
        for lineno, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(header):
                raise ScanFormatError(
                    f"{path}:{lineno}: expected {len(header)} columns, got {len(record)}"
                )
            try:
                values = [float(v) for v in record]
            except ValueError as exc:
                raise ScanFormatError(f"{path}:{lineno}: {exc}") from exc
            if not all(math.isfinite(v) for v in values):
                raise ScanFormatError(f"{path}:{lineno}: non-finite value")
            rows.append(values)
    return np.array(rows, dtype=np.float64).reshape(-1, len(header))


def write_points(points: NDArray[np.float64], path: str | Path) -> Path:
    """Write an ``(n, 3)`` point cloud as ``x,y,intensity``."""
    path = Path(path)
    _write_table(path, POINTS_HEADER, np.asarray(points, dtype=np.float64).reshape(-1, 3))
    return path


def read_points(path: str | Path) -> NDArray[np.float64]:
    return _read_table(Path(path), POINTS_HEADER)


def write_trajectory(trajectory: Trajectory, path: str | Path) -> Path:
    path = Path(path)
    _write_table(path, TRAJECTORY_HEADER, ((p.t, p.x, p.y, p.yaw) for p in trajectory))
    return path


def read_trajectory(path: str | Path) -> Trajectory:
    """Read a ``t,x,y,yaw`` CSV.

    Raises
    ------
    TrajectoryError
        If timestamps are not strictly increasing.
    """
    table = _read_table(Path(path), TRAJECTORY_HEADER)
    return Trajectory([Pose2D(*row) for row in table.tolist()])


def write_landmarks(landmarks: Iterable[tuple[float, float, float]], path: str | Path) -> Path:
    """Write ground-truth landmarks as ``x,y,snr``."""
    path = Path(path)
    _write_table(path, LANDMARKS_HEADER, landmarks)
    return path


def read_landmarks(path: str | Path) -> NDArray[np.float64]:
    return _read_table(Path(path), LANDMARKS_HEADER)
