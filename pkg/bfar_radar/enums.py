"""
Enumerations for bfar-radar.
"""

from enum import Enum


class ScanFormat(str, Enum):
    """On-disk polar scan format.

    CSV_FLOAT - one azimuth per line, comma-separated decimals. Lossless.
    PGM8      - binary PGM (``P5``), width = range bins, height = azimuths,
                maxval 255. Intensities are clamped to [0, 255] and truncated
                toward zero on write.

    Both formats share a ``<name>.meta`` sidecar holding the geometry.
    """

    CSV_FLOAT = "csv_float"
    PGM8 = "pgm8"

    @property
    def extension(self) -> str:
        return ".csv" if self is ScanFormat.CSV_FLOAT else ".pgm"


class EstimatorKind(str, Enum):
    """Noise-level estimator plugged into the detector.

    CELL_AVERAGING     - Z is the sum of all reference cells.
    GREATEST_OF        - Z is twice the larger half-window sum.
    SMALLEST_OF        - Z is twice the smaller half-window sum.
    ORDERED_STATISTIC  - Z is W times the k-th smallest reference cell.
    """

    CELL_AVERAGING = "cell_averaging"
    GREATEST_OF = "greatest_of"
    SMALLEST_OF = "smallest_of"
    ORDERED_STATISTIC = "ordered_statistic"


class Objective(str, Enum):
    """Selection objective for the (a, b) grid search."""

    TRANSLATION = "translation"
    ATE = "ate"


class RunStatus(str, Enum):
    """Outcome of one pipeline run inside a grid search or sweep."""

    OK = "ok"
    FAILED = "failed"
    INVALID = "invalid"


class SweepParameter(str, Enum):
    """Threshold parameter swept when tracing a ROC curve."""

    A = "a"
    B = "b"
