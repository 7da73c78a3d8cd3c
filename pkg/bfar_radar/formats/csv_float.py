"""
``csv_float`` scan payload: one azimuth per line, comma-separated decimals.

Values are written with Python's shortest round-trip ``repr``, so a
write/read cycle reproduces every float64 bit-for-bit.
"""

from __future__ import annotations

import csv
import logging
import math
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from bfar_radar.errors import ScanFormatError
from bfar_radar.formats.sidecar import ScanMeta

logger = logging.getLogger(__name__)


class CsvFloatCodec:
    """Lossless decimal CSV codec."""

    extension = ".csv"

    def read_cells(self, path: Path, meta: ScanMeta) -> NDArray[np.float64]:
        rows: list[list[float]] = []
        with path.open(newline="", encoding="utf-8") as fh:
            for lineno, record in enumerate(csv.reader(fh), start=1):
                if not record or all(not v.strip() for v in record):
                    continue
                try:
                    values = [float(v) for v in record]
                except ValueError as exc:
                    raise ScanFormatError(f"{path}:{lineno}: {exc}") from exc
                if any(not math.isfinite(v) for v in values):
                    raise ScanFormatError(f"{path}:{lineno}: non-finite intensity")
                if any(v < 0 for v in values):
                    raise ScanFormatError(f"{path}:{lineno}: negative intensity")
                if len(values) != meta.num_range_bins:
                    raise ScanFormatError(
                        f"{path}:{lineno}: {len(values)} values, sidecar declares "
                        f"{meta.num_range_bins} range bins"
                    )
                rows.append(values)

        if len(rows) != meta.num_azimuths:
            raise ScanFormatError(
                f"{path}: {len(rows)} azimuth lines, sidecar declares {meta.num_azimuths}"
            )
        return np.array(rows, dtype=np.float64)

    def write_cells(self, cells: NDArray[np.float64], path: Path) -> None:
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            for row in cells:
                writer.writerow([repr(float(v)) for v in row])
