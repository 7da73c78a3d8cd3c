"""On-disk scan codecs and the shared geometry sidecar."""

from bfar_radar.formats.csv_float import CsvFloatCodec
from bfar_radar.formats.pgm8 import Pgm8Codec
from bfar_radar.formats.sidecar import ScanMeta, read_meta, sidecar_path, write_meta

__all__ = [
    "CsvFloatCodec",
    "Pgm8Codec",
    "ScanMeta",
    "read_meta",
    "sidecar_path",
    "write_meta",
]
