"""
Detector parameter objects.

:class:`DetectorParams` is the full BFAR threshold specification
``T = a * Z + b``: scale ``a``, offset ``b``, the reference window ``W``
(total reference cells, both sides together) and the guard cells excluded on
each side of the cell under test. :class:`KStrongestParams` describes the
k-strongest baseline filter. Either object is accepted wherever a detector
specification is expected (odometry, grid search, CLI).

``Z`` is a *sum* over the reference cells, not a mean. Useful values of
``a`` are therefore small: ``a = PFAB**(-1/W) - 1``.

Examples
--------
>>> from bfar_radar.params import DetectorParams
>>> params = DetectorParams(scale_a=1.0, offset_b=20.0, window_w=40)
>>> params.half_window, params.guard_per_side
(20, 2)
>>> DetectorParams.from_half_window(20, scale_a=1.0, offset_b=20.0).window_w
40
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from bfar_radar.enums import EstimatorKind
from bfar_radar.errors import ParameterError

#: Guard cells on each side of the CUT ("four guard-samples, two on each side").
DEFAULT_GUARD_PER_SIDE = 2

#: Reference window used across the toolkit: N = 20 cells per side.
DEFAULT_WINDOW_W = 40


@dataclass(frozen=True)
class DetectorParams:
    """Threshold specification for the sliding-window detector.

    Attributes
    ----------
    scale_a:
        Dimensionless scale applied to the noise statistic, ``>= 0``.
    offset_b:
        Additive offset in intensity units, ``>= 0``.
    window_w:
        Total reference cells, even and ``>= 2``; ``W/2`` on each side.
    guard_per_side:
        Cells adjacent to the CUT excluded from the estimate on each side.
    estimator_kind:
        Noise-level estimator; see :class:`~bfar_radar.enums.EstimatorKind`.
        Any other string names a block added with
        :func:`~bfar_radar.estimators.register_estimator`.
    os_rank:
        ``k`` for the ordered-statistic estimator (``1 <= k <= W``); must be
        ``None`` for every other estimator.

    Raises
    ------
    ParameterError
        On any invariant violation, including ``a = b = 0``.
    """

    scale_a: float
    offset_b: float
    window_w: int = DEFAULT_WINDOW_W
    guard_per_side: int = DEFAULT_GUARD_PER_SIDE
    estimator_kind: EstimatorKind | str = EstimatorKind.CELL_AVERAGING
    os_rank: int | None = None

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "estimator_kind", EstimatorKind(self.estimator_kind))
        except ValueError:
            if not str(self.estimator_kind):
                raise ParameterError("estimator_kind must not be empty") from None
        if not (math.isfinite(self.scale_a) and self.scale_a >= 0):
            raise ParameterError(f"scale_a must be finite and >= 0, got {self.scale_a}")
        if not (math.isfinite(self.offset_b) and self.offset_b >= 0):
            raise ParameterError(f"offset_b must be finite and >= 0, got {self.offset_b}")
        if self.scale_a == 0 and self.offset_b == 0:
            raise ParameterError("scale_a and offset_b cannot both be zero (no threshold)")
        if int(self.window_w) != self.window_w or self.window_w < 2 or self.window_w % 2:
            raise ParameterError(f"window_w must be an even integer >= 2, got {self.window_w}")
        if int(self.guard_per_side) != self.guard_per_side or self.guard_per_side < 0:
            raise ParameterError(f"guard_per_side must be >= 0, got {self.guard_per_side}")
        if self.estimator_kind is EstimatorKind.ORDERED_STATISTIC:
            if self.os_rank is None or not 1 <= self.os_rank <= self.window_w:
                raise ParameterError(
                    f"ordered_statistic needs 1 <= os_rank <= {self.window_w}, got {self.os_rank}"
                )
        elif self.os_rank is not None:
            raise ParameterError(f"os_rank only applies to ordered_statistic, got {self.os_rank}")

    # ------------------------------------------------------------------
    # Alternative constructors
    # ------------------------------------------------------------------

    @classmethod
    def from_half_window(
        cls,
        half_window: int,
        *,
        scale_a: float,
        offset_b: float,
        guard_per_side: int = DEFAULT_GUARD_PER_SIDE,
        estimator_kind: EstimatorKind | str = EstimatorKind.CELL_AVERAGING,
        os_rank: int | None = None,
    ) -> DetectorParams:
        """Build from ``N`` reference cells per side (``W = 2N``)."""
        return cls(
            scale_a=scale_a,
            offset_b=offset_b,
            window_w=2 * half_window,
            guard_per_side=guard_per_side,
            estimator_kind=estimator_kind,
            os_rank=os_rank,
        )

    @classmethod
    def from_pfa_bound(
        cls,
        pfa_bound: float,
        offset_b: float,
        window_w: int = DEFAULT_WINDOW_W,
        *,
        guard_per_side: int = DEFAULT_GUARD_PER_SIDE,
    ) -> DetectorParams:
        """Build a cell-averaging detector whose scale meets *pfa_bound*.

        ``a`` is solved from ``(1 + a)**(-W) = pfa_bound``; ``b`` is taken
        as given (it is the parameter learned from data).
        """
        from bfar_radar.analysis import solve_a_for_bound

        return cls(
            scale_a=solve_a_for_bound(pfa_bound, window_w),
            offset_b=offset_b,
            window_w=window_w,
            guard_per_side=guard_per_side,
        )

    # ------------------------------------------------------------------
    # Derived values
    # ------------------------------------------------------------------

    @property
    def estimator_name(self) -> str:
        kind = self.estimator_kind
        return kind.value if isinstance(kind, EstimatorKind) else str(kind)

    @property
    def half_window(self) -> int:
        return self.window_w // 2

    @property
    def pad(self) -> int:
        """Mirror padding applied to each end of a profile."""
        return self.half_window + self.guard_per_side

    @property
    def min_profile_length(self) -> int:
        """Shortest profile the detector accepts: ``W + 2 * guard + 1``."""
        return self.window_w + 2 * self.guard_per_side + 1

    def with_threshold(self, scale_a: float, offset_b: float) -> DetectorParams:
        """Copy with a new ``(a, b)`` pair; window and estimator unchanged."""
        return replace(self, scale_a=scale_a, offset_b=offset_b)

    def describe(self) -> str:
        kind = self.estimator_name
        if self.os_rank is not None:
            kind = f"{kind}(k={self.os_rank})"
        return (
            f"BFAR a={self.scale_a:g} b={self.offset_b:g} W={self.window_w} "
            f"guard={self.guard_per_side} estimator={kind}"
        )


@dataclass(frozen=True)
class KStrongestParams:
    """Baseline filter keeping the ``k`` strongest returns per azimuth."""

    k: int

    def __post_init__(self) -> None:
        if int(self.k) != self.k or self.k < 1:
            raise ParameterError(f"k must be a positive integer, got {self.k}")

    def describe(self) -> str:
        return f"k-strongest k={self.k}"


#: Anything the pipeline accepts as a detector specification.
DetectorSpec = DetectorParams | KStrongestParams
