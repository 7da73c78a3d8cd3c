"""
Structural protocols for the two pluggable blocks of bfar-radar.

Any class implementing the methods below is valid - no inheritance
required. The protocols let third parties add scan formats (registered with
:func:`bfar_radar.io.register_codec`) and noise-level estimators (registered
with :func:`bfar_radar.estimators.register_estimator`) without modifying
library internals.

Examples
--------
>>> from bfar_radar.protocol import NoiseEstimator
>>> from bfar_radar.estimators import CellAveraging
>>> assert isinstance(CellAveraging(), NoiseEstimator)
"""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING, Protocol, runtime_checkable

import numpy as np
from numpy.typing import NDArray

if TYPE_CHECKING:
    from bfar_radar.formats.sidecar import ScanMeta


@runtime_checkable
class ScanCodec(Protocol):
    """Reads and writes the cell matrix of one on-disk scan format.

    Geometry lives in the shared ``.meta`` sidecar, so codecs only deal with
    intensities.
    """

    extension: str

    def read_cells(self, path: Path, meta: ScanMeta) -> NDArray[np.float64]:
        """Return the ``(num_azimuths, num_range_bins)`` intensity matrix.

        Raises
        ------
        ScanFormatError
            If the payload is malformed or disagrees with *meta*.
        """
        ...

    def write_cells(self, cells: NDArray[np.float64], path: Path) -> None:
        """Write the intensity matrix to *path*."""
        ...


@runtime_checkable
class NoiseEstimator(Protocol):
    """Computes the noise statistic ``Z`` for every cell of padded profiles.

    The detector mirror-pads each profile by ``half_window + guard`` cells on
    both ends and hands the estimator the padded rows. For output column
    ``j`` the left reference cells are padded columns ``j .. j + half - 1``
    and the right reference cells are padded columns
    ``j + half + 2 * guard + 1 .. j + 2 * (half + guard)``.
    """

    def __call__(
        self, padded: NDArray[np.float64], half_window: int, guard: int
    ) -> NDArray[np.float64]:
        """Return ``Z`` with shape ``(rows, padded_columns - 2 * (half_window + guard))``."""
        ...
