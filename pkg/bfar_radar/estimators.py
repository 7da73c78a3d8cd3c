"""
Noise-level estimators plugged into the sliding-window detector.

Each estimator receives mirror-padded rows and returns the statistic ``Z``
for every original cell (see :class:`~bfar_radar.protocol.NoiseEstimator`
for the column layout). All built-ins return magnitudes commensurate with
the cell-averaging *sum*, so one ``(a, b)`` grid applies to every block:

- cell averaging      ``Z = sum(left) + sum(right)``
- greatest of         ``Z = 2 * max(sum(left), sum(right))``
- smallest of         ``Z = 2 * min(sum(left), sum(right))``
- ordered statistic   ``Z = W * x_(k)``, the k-th smallest reference cell

Custom blocks are added with :func:`register_estimator`.

Examples
--------
>>> from bfar_radar.estimators import estimator_for, register_estimator
>>> estimator = estimator_for(params)
>>> z = estimator(padded_rows, params.half_window, params.guard_per_side)
>>>
>>> # Median-based block
>>> register_estimator("median", lambda params: MedianEstimator())
"""

from __future__ import annotations

import logging
from collections.abc import Callable

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from numpy.typing import NDArray

from bfar_radar.enums import EstimatorKind
from bfar_radar.errors import ParameterError
from bfar_radar.params import DetectorParams
from bfar_radar.protocol import NoiseEstimator

logger = logging.getLogger(__name__)


def _output_width(padded: NDArray[np.float64], half_window: int, guard: int) -> int:
    return int(padded.shape[-1]) - 2 * (half_window + guard)


def half_window_views(
    padded: NDArray[np.float64], half_window: int, guard: int
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Left and right reference windows, each ``(rows, width, half_window)``."""
    width = _output_width(padded, half_window, guard)
    windows = sliding_window_view(padded, half_window, axis=-1)
    right_start = half_window + 2 * guard + 1
    return windows[:, :width, :], windows[:, right_start : right_start + width, :]


def half_window_sums(
    padded: NDArray[np.float64], half_window: int, guard: int
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Sums of the left and right reference windows for every output column."""
    left, right = half_window_views(padded, half_window, guard)
    return left.sum(axis=-1), right.sum(axis=-1)


# ---------------------------------------------------------------------------
# Built-in estimators
# ---------------------------------------------------------------------------


class CellAveraging:
    """Sum of all ``W`` reference cells (not the mean)."""

    def __call__(
        self, padded: NDArray[np.float64], half_window: int, guard: int
    ) -> NDArray[np.float64]:
        left, right = half_window_sums(padded, half_window, guard)
        return left + right


class GreatestOf:
    """Twice the larger half-window sum; robust at clutter edges."""

    def __call__(
        self, padded: NDArray[np.float64], half_window: int, guard: int
    ) -> NDArray[np.float64]:
        left, right = half_window_sums(padded, half_window, guard)
        return 2.0 * np.maximum(left, right)


class SmallestOf:
    """Twice the smaller half-window sum; resolves closely spaced targets."""

    def __call__(
        self, padded: NDArray[np.float64], half_window: int, guard: int
    ) -> NDArray[np.float64]:
        left, right = half_window_sums(padded, half_window, guard)
        return 2.0 * np.minimum(left, right)


class OrderedStatistic:
    """``W`` times the ``rank``-th smallest reference cell (1-based rank).

    Parameters
    ----------
    rank:
        Order statistic ``k``, ``1 <= k <= W``.
    """

    def __init__(self, rank: int) -> None:
        if rank < 1:
            raise ParameterError(f"rank must be >= 1, got {rank}")
        self.rank = rank

    def __call__(
        self, padded: NDArray[np.float64], half_window: int, guard: int
    ) -> NDArray[np.float64]:
        window_w = 2 * half_window
        if self.rank > window_w:
            raise ParameterError(f"rank {self.rank} exceeds the {window_w} reference cells")
        left, right = half_window_views(padded, half_window, guard)
        reference = np.concatenate((left, right), axis=-1)
        kth = np.partition(reference, self.rank - 1, axis=-1)[..., self.rank - 1]
        return float(window_w) * kth

    def __repr__(self) -> str:
        return f"OrderedStatistic(rank={self.rank})"


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

EstimatorFactory = Callable[[DetectorParams], NoiseEstimator]

# Process-global; register custom blocks at import or startup.
_REGISTRY: dict[str, EstimatorFactory] = {
    EstimatorKind.CELL_AVERAGING.value: lambda params: CellAveraging(),
    EstimatorKind.GREATEST_OF.value: lambda params: GreatestOf(),
    EstimatorKind.SMALLEST_OF.value: lambda params: SmallestOf(),
    EstimatorKind.ORDERED_STATISTIC.value: lambda params: OrderedStatistic(
        params.os_rank if params.os_rank is not None else 1
    ),
}


def register_estimator(kind: EstimatorKind | str, factory: EstimatorFactory) -> None:
    """Register (or replace) the estimator built for *kind*.

    *factory* receives the :class:`~bfar_radar.params.DetectorParams` being
    evaluated and returns an object satisfying
    :class:`~bfar_radar.protocol.NoiseEstimator`.
    """
    name = kind.value if isinstance(kind, EstimatorKind) else str(kind)
    _REGISTRY[name] = factory
    logger.debug(f"Registered noise estimator for {name!r}.")


def registered_estimators() -> list[str]:
    return sorted(_REGISTRY)


def estimator_for(params: DetectorParams) -> NoiseEstimator:
    """Build the estimator selected by ``params.estimator_kind``.

    Raises
    ------
    ParameterError
        If no estimator is registered for the kind.
    TypeError
        If the registered factory returns something that is not a
        :class:`~bfar_radar.protocol.NoiseEstimator`.
    """
    name = params.estimator_name
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise ParameterError(
            f"No noise estimator registered for {name!r}. "
            f"Known: {', '.join(registered_estimators())}"
        ) from None
    estimator = factory(params)
    if not isinstance(estimator, NoiseEstimator):
        raise TypeError(f"Estimator factory for {name!r} returned {type(estimator).__name__}")
    return estimator
