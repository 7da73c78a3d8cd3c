"""
Closed-form false-alarm / detection probabilities and Monte Carlo checks.

Noise model
-----------
After a square-law detector each noise sample is exponential with PDF
``(1 / 2mu) exp(-x / 2mu)``, i.e. MEAN ``2 * mu``. A target of average SNR
``S`` raises the CUT mean to ``2 * mu * (1 + S)``. ``Z`` is the sum of ``w``
independent reference samples and therefore Gamma distributed, which gives

- ``PFA  = (1 + a)**(-w) * exp(-b / (2 mu))``
- ``PFAB = (1 + a)**(-w)``  (upper bound, reached at ``b = 0`` or ``mu -> inf``)
- ``PD   = (1 + a / (1 + S))**(-w) * exp(-b / (2 mu (1 + S)))``

``w`` is always the reference-cell COUNT (both sides together).

Powers are evaluated as ``exp(-w * log1p(a))`` so tiny ``a`` keeps full
precision.

Examples
--------
>>> from bfar_radar.analysis import pfa_upper_bound, solve_a_for_bound
>>> f"{pfa_upper_bound(1.0, 20):.3g}"
'9.54e-07'
>>> round(solve_a_for_bound(2.0 ** -20, 20), 12)
1.0

Authors
-------
Chaitanya Kasaraneni
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from numpy.typing import ArrayLike
from scipy import stats

from bfar_radar.enums import SweepParameter
from bfar_radar.errors import ParameterError
from bfar_radar.estimators import CellAveraging
from bfar_radar.params import DEFAULT_GUARD_PER_SIDE, DetectorParams
from bfar_radar.scan import NoiseModel

logger = logging.getLogger(__name__)

#: Smallest Monte Carlo run accepted by :func:`mc_estimate`.
MIN_MC_TRIALS = 10_000

#: Trials per independently seeded block; fixed so results do not depend on workers.
MC_BLOCK_SIZE = 1 << 15

#: Confidence level of every reported Wilson interval.
DEFAULT_CONFIDENCE = 0.95

#: Relative slack allowed when checking a closed-form PFA against its bound.
BOUND_RTOL = 1e-9


# ---------------------------------------------------------------------------
# Domain checks
# ---------------------------------------------------------------------------


def _check_nonneg(name: str, value: float) -> None:
    if math.isnan(value) or value < 0:
        raise ParameterError(f"{name} must be >= 0, got {value}")


def _check_mu(mu: float) -> None:
    if not (math.isfinite(mu) and mu > 0):
        raise ParameterError(f"mu must be finite and > 0, got {mu}")


def _check_w(w: int) -> None:
    if int(w) != w or w < 1:
        raise ParameterError(f"w must be an integer >= 1, got {w}")


def _check_snr(s: float) -> None:
    if not (math.isfinite(s) and s >= 0):
        raise ParameterError(f"snr must be finite and >= 0, got {s}")


def _check_probability(name: str, p: float) -> None:
    if not 0 < p <= 1:
        raise ParameterError(f"{name} must be in (0, 1], got {p}")


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


def pfa_upper_bound(a: float, w: int) -> float:
    """PFA bound ``(1 + a)**(-w)``; also the CA-CFAR PFA (``b = 0``)."""
    _check_nonneg("a", a)
    _check_w(w)
    return math.exp(-w * math.log1p(a))


def pfa_closed_form(a: float, b: float, mu: float, w: int) -> float:
    """Probability of false alarm ``(1 + a)**(-w) * exp(-b / (2 mu))``.

    Parameters
    ----------
    a:
        Scale applied to ``Z``, ``>= 0``.
    b:
        Offset in intensity units, ``>= 0``.
    mu:
        Background power, ``> 0``.
    w:
        Number of reference cells.

    Raises
    ------
    ParameterError
        On any domain violation.
    """
    _check_nonneg("a", a)
    _check_nonneg("b", b)
    _check_mu(mu)
    _check_w(w)
    return math.exp(-w * math.log1p(a) - b / (2.0 * mu))


def pd_closed_form(a: float, b: float, mu: float, s: float, w: int) -> float:
    """Probability of detection for a target of average SNR *s*.

    With ``s = 0`` the result is bit-identical to :func:`pfa_closed_form`.
    """
    _check_nonneg("a", a)
    _check_nonneg("b", b)
    _check_mu(mu)
    _check_snr(s)
    _check_w(w)
    gain = 1.0 + s
    return math.exp(-w * math.log1p(a / gain) - b / (2.0 * mu * gain))


def solve_a_for_bound(pfa_ub: float, w: int) -> float:
    """Scale ``a`` whose PFA bound is *pfa_ub*: ``a = pfa_ub**(-1/w) - 1``.

    Raises
    ------
    ParameterError
        If *pfa_ub* is outside ``(0, 1]``.
    """
    _check_probability("pfa_ub", pfa_ub)
    _check_w(w)
    return max(0.0, math.expm1(-math.log(pfa_ub) / w))


def solve_b_for_pfa(pfa: float, a: float, mu: float, w: int) -> float:
    """Offset ``b`` reaching *pfa* at noise power *mu* for a given ``a``.

    Raises
    ------
    ParameterError
        If *pfa* exceeds the bound ``(1 + a)**(-w)`` (no ``b >= 0`` reaches it).
    """
    _check_probability("pfa", pfa)
    _check_nonneg("a", a)
    _check_mu(mu)
    _check_w(w)
    log_bound = -w * math.log1p(a)
    log_pfa = math.log(pfa)
    if log_pfa > log_bound + 1e-12 * max(1.0, abs(log_bound)):
        raise ParameterError(
            f"pfa {pfa:g} exceeds the bound {math.exp(log_bound):g} for a={a:g}, w={w}"
        )
    return max(0.0, 2.0 * mu * (log_bound - log_pfa))


def pfab_table(a_values: Iterable[float], w: int) -> list[tuple[float, float]]:
    """``(a, PFAB)`` pairs for a grid of scales."""
    return [(float(a), pfa_upper_bound(a, w)) for a in a_values]


# ---------------------------------------------------------------------------
# Result types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DetectionStats:
    """PFA, PD, and PFA bound for one parameter point.

    ``trials`` and the half-widths are only set for Monte Carlo estimates;
    half-widths are those of 95% Wilson intervals. Closed-form stats must
    satisfy ``pfa <= pfa_upper_bound``; a Monte Carlo PFA may sit above the
    bound by sampling noise.
    """

    pfa: float
    pd: float
    pfa_upper_bound: float
    trials: int | None = None
    wilson_halfwidth: float | None = None
    pd_halfwidth: float | None = None

    def __post_init__(self) -> None:
        for name in ("pfa", "pd", "pfa_upper_bound"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ParameterError(f"{name} must be a probability, got {value}")
        if self.trials is None and self.pfa > self.pfa_upper_bound * (1.0 + BOUND_RTOL):
            raise ParameterError(
                f"pfa {self.pfa:g} exceeds its upper bound {self.pfa_upper_bound:g}"
            )

    @property
    def is_monte_carlo(self) -> bool:
        return self.trials is not None

    def to_dict(self) -> dict[str, float | int | None]:
        return asdict(self)


def detection_stats(a: float, b: float, mu: float, s: float, w: int) -> DetectionStats:
    """Closed-form :class:`DetectionStats`."""
    return DetectionStats(
        pfa=pfa_closed_form(a, b, mu, w),
        pd=pd_closed_form(a, b, mu, s, w),
        pfa_upper_bound=pfa_upper_bound(a, w),
    )


def wilson_interval(
    successes: int, trials: int, confidence: float = DEFAULT_CONFIDENCE
) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1 or not 0 <= successes <= trials:
        raise ParameterError(
            f"need 0 <= successes <= trials and trials >= 1, got {successes}/{trials}"
        )
    ci = stats.binomtest(int(successes), int(trials)).proportion_ci(
        confidence_level=confidence, method="wilson"
    )
    return float(ci.low), float(ci.high)


def wilson_halfwidth(successes: int, trials: int, confidence: float = DEFAULT_CONFIDENCE) -> float:
    low, high = wilson_interval(successes, trials, confidence)
    return 0.5 * (high - low)


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


def _block_generator(seed: int, block: int) -> np.random.Generator:
    # counter-based stream per block: identical draws under any scheduling
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))


def _mc_block(
    seed: int,
    block: int,
    size: int,
    a: float,
    b: float,
    mu: float,
    s: float,
    half_window: int,
    guard: int,
) -> tuple[int, int]:
    rng = _block_generator(seed, block)
    width = 2 * (half_window + guard) + 1
    rows = rng.exponential(2.0 * mu, size=(size, width))
    z = CellAveraging()(rows, half_window, guard)[:, 0]
    threshold = a * z + b
    cut = rows[:, half_window + guard]
    false_alarms = int(np.count_nonzero(cut > threshold))
    if s == 0:
        return false_alarms, false_alarms
    target = rng.exponential(2.0 * mu * (1.0 + s), size=size)
    return false_alarms, int(np.count_nonzero(target > threshold))


def mc_estimate(
    a: float,
    b: float,
    mu: float,
    s: float,
    w: int,
    guard: int = DEFAULT_GUARD_PER_SIDE,
    trials: int = 1_000_000,
    seed: int = 42,
    *,
    workers: int = 1,
) -> DetectionStats:
    """Monte Carlo estimate of PFA and PD.

    Each trial draws one window of ``w + 2 * guard + 1`` cells with mean
    ``2 mu``, forms ``T = a * sum(reference) + b`` with the detector's own
    estimator, and tests the centre cell (PFA) plus a separately drawn
    target cell with mean ``2 mu (1 + s)`` (PD). With ``s = 0`` the PD
    equals the PFA estimate.

    Trials are split into fixed blocks of :data:`MC_BLOCK_SIZE`; block ``k``
    draws from ``Philox(SeedSequence([seed, k]))``. Counts are integers, so
    the result is identical for any *workers*.

    Raises
    ------
    ParameterError
        If ``trials < 10_000``, ``w`` is not even, or any domain check fails.
    """
    _check_nonneg("a", a)
    _check_nonneg("b", b)
    _check_mu(mu)
    _check_snr(s)
    if int(w) != w or w < 2 or w % 2:
        raise ParameterError(f"w must be an even integer >= 2 for Monte Carlo, got {w}")
    if guard < 0:
        raise ParameterError(f"guard must be >= 0, got {guard}")
    if trials < MIN_MC_TRIALS:
        raise ParameterError(f"trials must be >= {MIN_MC_TRIALS}, got {trials}")
    if seed < 0:
        raise ParameterError(f"seed must be >= 0, got {seed}")

    sizes = [MC_BLOCK_SIZE] * (trials // MC_BLOCK_SIZE)
    if trials % MC_BLOCK_SIZE:
        sizes.append(trials % MC_BLOCK_SIZE)
    args = [(seed, k, size, a, b, mu, s, w // 2, guard) for k, size in enumerate(sizes)]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda arg: _mc_block(*arg), args))
    else:
        counts = [_mc_block(*arg) for arg in args]

    false_alarms = sum(c[0] for c in counts)
    hits = sum(c[1] for c in counts)
    logger.debug(
        f"MC a={a:g} b={b:g} mu={mu:g} s={s:g} w={w}: {false_alarms} false alarms, "
        f"{hits} detections in {trials} trials"
    )
    return DetectionStats(
        pfa=false_alarms / trials,
        pd=hits / trials,
        pfa_upper_bound=pfa_upper_bound(a, w),
        trials=trials,
        wilson_halfwidth=wilson_halfwidth(false_alarms, trials),
        pd_halfwidth=wilson_halfwidth(hits, trials),
    )


@dataclass(frozen=True)
class FalseAlarmRate:
    """False-alarm rate measured by running the detector on pure noise."""

    rate: float
    false_alarms: int
    cells: int
    halfwidth: float


def empirical_false_alarm_rate(
    params: DetectorParams,
    mu: float,
    num_profiles: int,
    profile_length: int,
    seed: int = 42,
) -> FalseAlarmRate:
    """Run :func:`~bfar_radar.detector.detect_matrix` on exponential noise.

    Only interior cells are counted: cells within ``W/2 + guard`` of either
    end see mirrored samples, so their reference halves are not independent
    and the closed-form PFA does not apply to them.
    """
    from bfar_radar.detector import detect_matrix

    _check_mu(mu)
    pad = params.pad
    if profile_length < 2 * pad + 1 or num_profiles < 1:
        raise ParameterError(
            f"need num_profiles >= 1 and profile_length >= {2 * pad + 1}, "
            f"got {num_profiles} x {profile_length}"
        )
    rng = np.random.default_rng(seed)
    noise = rng.exponential(2.0 * mu, size=(num_profiles, profile_length))
    interior = detect_matrix(noise, params)[:, pad : profile_length - pad]
    false_alarms = int(np.count_nonzero(interior))
    cells = int(interior.size)
    return FalseAlarmRate(
        rate=false_alarms / cells,
        false_alarms=false_alarms,
        cells=cells,
        halfwidth=wilson_halfwidth(false_alarms, cells),
    )


def expected_false_alarms(
    a: float,
    b: float,
    noise_model: NoiseModel,
    w: int,
    shape: tuple[int, int] | None = None,
) -> float:
    """Expected false-alarm count over a scan: per-cell PFA summed over ``mu``.

    *shape* is required when ``noise_model.mu`` is a scalar.
    """
    _check_nonneg("a", a)
    _check_nonneg("b", b)
    _check_w(w)
    if shape is None:
        if not isinstance(noise_model.mu, np.ndarray):
            raise ParameterError("shape is required for a scalar noise model")
        shape = noise_model.mu.shape  # type: ignore[assignment]
    mu = noise_model.mu_matrix(shape)  # type: ignore[arg-type]
    return float(np.sum(np.exp(-w * math.log1p(a) - b / (2.0 * mu))))


def ks_exponential(samples: ArrayLike, mean: float) -> float:
    """Kolmogorov-Smirnov p-value of *samples* against Exponential(mean)."""
    _check_mu(mean)
    data = np.asarray(samples, dtype=np.float64).reshape(-1)
    if data.size == 0:
        raise ParameterError("ks_exponential needs at least one sample")
    return float(stats.kstest(data, "expon", args=(0.0, mean)).pvalue)


# ---------------------------------------------------------------------------
# ROC
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThresholdSweep:
    """Values of ``a`` or ``b`` to sweep while the other stays at *fixed*."""

    parameter: SweepParameter
    values: tuple[float, ...]
    fixed: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "parameter", SweepParameter(self.parameter))
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ParameterError("sweep needs at least one value")
        for v in (*values, self.fixed):
            _check_nonneg("sweep value", v)
        object.__setattr__(self, "values", values)

    def ab(self, value: float) -> tuple[float, float]:
        if self.parameter is SweepParameter.A:
            return value, self.fixed
        return self.fixed, value


@dataclass(frozen=True)
class RocPoint:
    param: float
    pfa: float
    pd: float


def roc_curve(sweep: ThresholdSweep, mu: float, s: float, w: int) -> list[RocPoint]:
    """Closed-form ``(pfa, pd)`` along a threshold sweep, ascending in the parameter.

    Both probabilities are non-increasing along the returned list, and
    ``pd >= pfa`` whenever ``s > 0``.
    """
    points = []
    for value in sorted(set(sweep.values)):
        a, b = sweep.ab(value)
        points.append(
            RocPoint(value, pfa_closed_form(a, b, mu, w), pd_closed_form(a, b, mu, s, w))
        )
    return points


# ---------------------------------------------------------------------------
# Closed form vs Monte Carlo
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationPoint:
    a: float
    b: float
    mu: float
    s: float
    w: int


@dataclass(frozen=True)
class ValidationRow:
    """One ``mc-validate`` report row.

    ``closed_pfa`` / ``mc_pfa`` hold the exceedance probability of the CUT
    under SNR ``s``: the PFA when ``s = 0`` and the PD otherwise.
    """

    a: float
    b: float
    mu: float
    s: float
    w: int
    closed_pfa: float
    mc_pfa: float
    halfwidth: float
    passed: bool

    HEADER = ("a", "b", "mu", "s", "w", "closed_pfa", "mc_pfa", "halfwidth", "pass")

    def as_row(self) -> tuple[object, ...]:
        return (
            self.a,
            self.b,
            self.mu,
            self.s,
            self.w,
            self.closed_pfa,
            self.mc_pfa,
            self.halfwidth,
            self.passed,
        )


#: 24-point grid over (a, b, mu, S, w) used by ``mc-validate`` and the eval harness.
DEFAULT_VALIDATION_GRID: tuple[ValidationPoint, ...] = tuple(
    ValidationPoint(a, b, mu, s, w)
    for a, b, mu, (s, w) in itertools.product(
        (0.0, 0.05, 0.1), (0.0, 10.0), (5.0, 20.0), ((0.0, 16), (10.0, 40))
    )
)


def validate_point(
    point: ValidationPoint,
    trials: int,
    seed: int,
    *,
    guard: int = DEFAULT_GUARD_PER_SIDE,
    sigmas: float = 3.0,
    workers: int = 1,
) -> ValidationRow:
    estimate = mc_estimate(
        point.a, point.b, point.mu, point.s, point.w, guard, trials, seed, workers=workers
    )
    if point.s == 0:
        closed = pfa_closed_form(point.a, point.b, point.mu, point.w)
        measured, halfwidth = estimate.pfa, estimate.wilson_halfwidth or 0.0
    else:
        closed = pd_closed_form(point.a, point.b, point.mu, point.s, point.w)
        measured, halfwidth = estimate.pd, estimate.pd_halfwidth or 0.0
    passed = abs(measured - closed) <= sigmas * halfwidth
    if not passed:
        logger.warning(
            f"MC disagrees with closed form at {point}: {measured:.6g} vs {closed:.6g} "
            f"(halfwidth {halfwidth:.3g})"
        )
    return ValidationRow(
        point.a, point.b, point.mu, point.s, point.w, closed, measured, halfwidth, passed
    )


def mc_validate(
    points: Sequence[ValidationPoint] = DEFAULT_VALIDATION_GRID,
    trials: int = 1_000_000,
    seed: int = 42,
    *,
    sigmas: float = 3.0,
    workers: int = 1,
) -> list[ValidationRow]:
    """Compare Monte Carlo against the closed forms on a grid of points.

    Point ``i`` is simulated with a seed derived from ``(seed, i)``, so
    adding points never changes earlier rows.
    """
    rows = []
    for i, point in enumerate(points):
        point_seed = int(np.random.SeedSequence([seed, i]).generate_state(1)[0])
        rows.append(
            validate_point(point, trials, point_seed, sigmas=sigmas, workers=workers)
        )
    failed = sum(not r.passed for r in rows)
    logger.info(f"MC validation: {len(rows) - failed}/{len(rows)} points within {sigmas:g} sigma")
    return rows
