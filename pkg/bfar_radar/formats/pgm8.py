"""
``pgm8`` scan payload: binary PGM (``P5``) with maxval 255.

Width is the number of range bins and height the number of azimuths. On
write, intensities above 255 saturate to 255 and the rest are truncated
toward zero, so a round trip loses less than one intensity unit per cell.
"""

from __future__ import annotations

import logging
import re
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from bfar_radar.errors import ScanFormatError
from bfar_radar.formats.sidecar import ScanMeta

logger = logging.getLogger(__name__)

#: Largest pixel value; also the saturation level on write.
PGM_MAXVAL = 255

_TOKEN_RE = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def quantize(cells: NDArray[np.float64]) -> NDArray[np.uint8]:
    """Clamp to ``[0, 255]`` and truncate toward zero."""
    return np.trunc(np.clip(cells, 0.0, float(PGM_MAXVAL))).astype(np.uint8)


def _read_header(data: bytes, path: Path) -> tuple[int, int, int, int]:
    """Return ``(width, height, maxval, payload_offset)``."""
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < 4:
        match = _TOKEN_RE.match(data, pos)
        if match is None:
            raise ScanFormatError(f"{path}: truncated PGM header")
        tokens.append(match.group(1))
        pos = match.end()
    if tokens[0] != b"P5":
        raise ScanFormatError(f"{path}: not a binary PGM (magic {tokens[0]!r})")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise ScanFormatError(f"{path}: malformed PGM header: {exc}") from exc
    # exactly one whitespace byte separates maxval from the raster
    return width, height, maxval, pos + 1


class Pgm8Codec:
    """8-bit binary PGM codec."""

    extension = ".pgm"

    def read_cells(self, path: Path, meta: ScanMeta) -> NDArray[np.float64]:
        data = path.read_bytes()
        width, height, maxval, offset = _read_header(data, path)
        if maxval != PGM_MAXVAL:
            raise ScanFormatError(f"{path}: maxval must be {PGM_MAXVAL}, got {maxval}")
        if (height, width) != (meta.num_azimuths, meta.num_range_bins):
            raise ScanFormatError(
                f"{path}: image is {height}x{width}, sidecar declares "
                f"{meta.num_azimuths}x{meta.num_range_bins}"
            )
        payload = data[offset:]
        if len(payload) != width * height:
            raise ScanFormatError(
                f"{path}: expected {width * height} raster bytes, found {len(payload)}"
            )
        pixels = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
        return pixels.astype(np.float64)

    def write_cells(self, cells: NDArray[np.float64], path: Path) -> None:
        saturated = int(np.count_nonzero(cells > PGM_MAXVAL))
        if saturated:
            logger.debug(f"{path}: {saturated} cell(s) saturated at {PGM_MAXVAL}")
        height, width = cells.shape
        header = f"P5\n{width} {height}\n{PGM_MAXVAL}\n".encode("ascii")
        path.write_bytes(header + quantize(cells).tobytes())
