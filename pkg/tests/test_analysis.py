"""
Tests for bfar_radar.analysis.

Covers:
- closed forms: known values, limits, monotonicity, PD(S=0) == PFA
- solvers: a from a PFA bound, b from a target PFA, round trips, domain errors
- Wilson intervals against the textbook formula
- Monte Carlo: agreement with the closed forms, determinism across workers
- empirical false-alarm rate of the real detector on pure noise
- expected false alarms over a noise field, KS goodness of fit
- ROC sweeps and the validation grid
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from bfar_radar.analysis import (
    DEFAULT_VALIDATION_GRID,
    DetectionStats,
    ThresholdSweep,
    ValidationPoint,
    ValidationRow,
    detection_stats,
    empirical_false_alarm_rate,
    expected_false_alarms,
    ks_exponential,
    mc_estimate,
    mc_validate,
    pd_closed_form,
    pfa_closed_form,
    pfa_upper_bound,
    pfab_table,
    roc_curve,
    solve_a_for_bound,
    solve_b_for_pfa,
    validate_point,
    wilson_halfwidth,
    wilson_interval,
)
from bfar_radar.enums import SweepParameter
from bfar_radar.errors import ParameterError
from bfar_radar.params import DetectorParams
from bfar_radar.scan import NoiseModel

# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


class TestClosedForms:
    def test_upper_bound_known_value(self) -> None:
        assert pfa_upper_bound(1.0, 20) == pytest.approx(2.0**-20, rel=1e-12)

    def test_no_threshold_means_certain_alarm(self) -> None:
        assert pfa_closed_form(0.0, 0.0, 5.0, 40) == 1.0

    def test_pfa_factorises(self) -> None:
        expected = 1.1**-40 * math.exp(-10.0 / 10.0)
        assert pfa_closed_form(0.1, 10.0, 5.0, 40) == pytest.approx(expected, rel=1e-12)

    def test_pfa_equals_bound_at_zero_offset(self) -> None:
        assert pfa_closed_form(0.3, 0.0, 7.0, 16) == pfa_upper_bound(0.3, 16)

    def test_pfa_below_bound(self) -> None:
        for mu in (0.5, 5.0, 500.0):
            assert pfa_closed_form(0.1, 20.0, mu, 40) <= pfa_upper_bound(0.1, 40)

    def test_pfa_approaches_bound_as_mu_grows(self) -> None:
        assert pfa_closed_form(0.1, 20.0, 1e9, 40) == pytest.approx(
            pfa_upper_bound(0.1, 40), rel=1e-6
        )

    def test_pfa_monotone(self) -> None:
        assert pfa_closed_form(0.2, 10.0, 5.0, 40) < pfa_closed_form(0.1, 10.0, 5.0, 40)
        assert pfa_closed_form(0.1, 20.0, 5.0, 40) < pfa_closed_form(0.1, 10.0, 5.0, 40)
        assert pfa_closed_form(0.1, 10.0, 10.0, 40) > pfa_closed_form(0.1, 10.0, 5.0, 40)

    def test_pd_with_zero_snr_is_pfa(self) -> None:
        for a, b, mu, w in ((0.1, 10.0, 5.0, 40), (0.0, 3.0, 2.0, 8), (2.0, 0.0, 1.0, 20)):
            assert pd_closed_form(a, b, mu, 0.0, w) == pfa_closed_form(a, b, mu, w)

    def test_pd_at_least_pfa(self) -> None:
        for s in (0.5, 10.0, 1000.0):
            assert pd_closed_form(0.1, 10.0, 5.0, s, 40) >= pfa_closed_form(0.1, 10.0, 5.0, 40)

    def test_pd_increases_with_snr(self) -> None:
        values = [pd_closed_form(0.1, 10.0, 5.0, s, 40) for s in (1.0, 10.0, 100.0)]
        assert values == sorted(values)

    def test_pd_tends_to_one(self) -> None:
        assert pd_closed_form(0.1, 10.0, 5.0, 1e12, 40) == pytest.approx(1.0, abs=1e-9)

    def test_tiny_a_keeps_precision(self) -> None:
        # (1 + 1e-12)**-40 computed naively loses all but a few digits
        assert pfa_upper_bound(1e-12, 40) == pytest.approx(1.0 - 40e-12, rel=1e-15)

    def test_infinite_a_gives_zero(self) -> None:
        assert pfa_closed_form(math.inf, 0.0, 5.0, 40) == 0.0
        assert pfa_closed_form(0.1, math.inf, 5.0, 40) == 0.0

    @pytest.mark.parametrize(
        "args",
        [
            (-0.1, 0.0, 5.0, 40),
            (0.1, -1.0, 5.0, 40),
            (0.1, 0.0, 0.0, 40),
            (0.1, 0.0, -5.0, 40),
            (0.1, 0.0, 5.0, 0),
            (float("nan"), 0.0, 5.0, 40),
        ],
    )
    def test_domain_errors(self, args) -> None:
        with pytest.raises(ParameterError):
            pfa_closed_form(*args)

    def test_negative_snr_raises(self) -> None:
        with pytest.raises(ParameterError, match="snr"):
            pd_closed_form(0.1, 0.0, 5.0, -1.0, 40)

    def test_pfab_table(self) -> None:
        table = pfab_table([0.0, 1.0], 20)
        assert table[0] == (0.0, 1.0)
        assert table[1][1] == pytest.approx(2.0**-20)

    def test_detection_stats(self) -> None:
        stats = detection_stats(0.1, 10.0, 5.0, 10.0, 40)
        assert not stats.is_monte_carlo
        assert stats.pfa <= stats.pfa_upper_bound
        assert stats.pd >= stats.pfa
        assert set(stats.to_dict()) == {
            "pfa", "pd", "pfa_upper_bound", "trials", "wilson_halfwidth", "pd_halfwidth"
        }

    def test_detection_stats_rejects_non_probability(self) -> None:
        with pytest.raises(ParameterError):
            DetectionStats(pfa=1.5, pd=0.5, pfa_upper_bound=1.0)

    def test_closed_form_pfa_above_bound_rejected(self) -> None:
        with pytest.raises(ParameterError, match="exceeds its upper bound"):
            DetectionStats(pfa=0.02, pd=0.5, pfa_upper_bound=0.01)

    def test_pfa_at_bound_accepted(self) -> None:
        bound = pfa_upper_bound(1.0, 20)
        stats = DetectionStats(pfa=bound * (1.0 + 1e-12), pd=0.5, pfa_upper_bound=bound)
        assert stats.pfa == pytest.approx(stats.pfa_upper_bound)
        assert detection_stats(1.0, 0.0, 5.0, 0.0, 20).pfa == stats.pfa_upper_bound

    def test_monte_carlo_pfa_may_exceed_bound(self) -> None:
        stats = DetectionStats(
            pfa=0.0102, pd=0.5, pfa_upper_bound=0.01, trials=100_000, wilson_halfwidth=6e-4
        )
        assert stats.is_monte_carlo


# ---------------------------------------------------------------------------
# Solvers
# ---------------------------------------------------------------------------


class TestSolvers:
    @pytest.mark.parametrize("pfa", [0.5, 1e-2, 1e-6, 1e-12])
    @pytest.mark.parametrize("w", [16, 40])
    def test_solve_a_round_trip(self, pfa, w) -> None:
        assert pfa_upper_bound(solve_a_for_bound(pfa, w), w) == pytest.approx(pfa, rel=1e-9)

    def test_solve_a_known_value(self) -> None:
        assert solve_a_for_bound(2.0**-20, 20) == pytest.approx(1.0, rel=1e-12)

    def test_solve_a_at_one_is_zero(self) -> None:
        assert solve_a_for_bound(1.0, 40) == 0.0

    @pytest.mark.parametrize("pfa", [0.0, -0.1, 1.5])
    def test_solve_a_domain(self, pfa) -> None:
        with pytest.raises(ParameterError, match="pfa_ub"):
            solve_a_for_bound(pfa, 40)

    @pytest.mark.parametrize("pfa", [1e-3, 1e-6, 1e-10])
    def test_solve_b_round_trip(self, pfa) -> None:
        b = solve_b_for_pfa(pfa, 0.05, 5.0, 40)
        assert b >= 0
        assert pfa_closed_form(0.05, b, 5.0, 40) == pytest.approx(pfa, rel=1e-9)

    def test_solve_b_at_bound_is_zero(self) -> None:
        bound = pfa_upper_bound(0.1, 40)
        assert solve_b_for_pfa(bound, 0.1, 5.0, 40) == pytest.approx(0.0, abs=1e-9)

    def test_solve_b_above_bound_raises(self) -> None:
        with pytest.raises(ParameterError, match="exceeds the bound"):
            solve_b_for_pfa(0.1, 0.1, 5.0, 40)

    def test_solve_b_scales_with_mu(self) -> None:
        b5 = solve_b_for_pfa(1e-6, 0.05, 5.0, 40)
        b10 = solve_b_for_pfa(1e-6, 0.05, 10.0, 40)
        assert b10 == pytest.approx(2.0 * b5)


# ---------------------------------------------------------------------------
# Wilson intervals
# ---------------------------------------------------------------------------


class TestWilson:
    def test_textbook_value(self) -> None:
        low, high = wilson_interval(50, 100)
        assert low == pytest.approx(0.40383, abs=1e-3)
        assert high == pytest.approx(0.59617, abs=1e-3)

    def test_zero_successes(self) -> None:
        low, high = wilson_interval(0, 1000)
        assert low == pytest.approx(0.0, abs=1e-12)
        assert 0.0 < high < 0.01

    def test_halfwidth_shrinks_with_trials(self) -> None:
        assert wilson_halfwidth(1000, 10_000) < wilson_halfwidth(100, 1000)

    def test_invalid_counts(self) -> None:
        with pytest.raises(ParameterError):
            wilson_interval(5, 0)
        with pytest.raises(ParameterError):
            wilson_interval(11, 10)


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


class TestMonteCarlo:
    def test_pfa_agrees_with_closed_form(self) -> None:
        est = mc_estimate(0.05, 10.0, 5.0, 0.0, 16, trials=200_000, seed=1)
        closed = pfa_closed_form(0.05, 10.0, 5.0, 16)
        assert est.is_monte_carlo
        assert abs(est.pfa - closed) <= 3 * est.wilson_halfwidth

    def test_pd_agrees_with_closed_form(self) -> None:
        est = mc_estimate(0.05, 10.0, 5.0, 10.0, 40, trials=200_000, seed=2)
        closed = pd_closed_form(0.05, 10.0, 5.0, 10.0, 40)
        assert abs(est.pd - closed) <= 3 * est.pd_halfwidth

    def test_zero_snr_pd_equals_pfa(self) -> None:
        est = mc_estimate(0.05, 10.0, 5.0, 0.0, 16, trials=20_000, seed=3)
        assert est.pd == est.pfa

    def test_deterministic_for_seed(self) -> None:
        one = mc_estimate(0.05, 5.0, 5.0, 2.0, 16, trials=50_000, seed=7)
        two = mc_estimate(0.05, 5.0, 5.0, 2.0, 16, trials=50_000, seed=7)
        assert one == two

    def test_independent_of_workers(self) -> None:
        serial = mc_estimate(0.05, 5.0, 5.0, 2.0, 16, trials=100_000, seed=7)
        threaded = mc_estimate(0.05, 5.0, 5.0, 2.0, 16, trials=100_000, seed=7, workers=3)
        assert serial == threaded

    @pytest.mark.parametrize(
        "kwargs",
        [{"trials": 9_999}, {"w": 15}, {"seed": -1}, {"guard": -1}],
    )
    def test_argument_validation(self, kwargs) -> None:
        args = {"a": 0.05, "b": 5.0, "mu": 5.0, "s": 0.0, "w": 16, "trials": 20_000}
        args.update(kwargs)
        with pytest.raises(ParameterError):
            mc_estimate(**args)

    def test_empirical_far_matches_closed_form(self) -> None:
        params = DetectorParams(scale_a=0.05, offset_b=10.0, window_w=16, guard_per_side=2)
        far = empirical_false_alarm_rate(params, 5.0, num_profiles=500, profile_length=200)
        assert far.cells == 500 * (200 - 2 * params.pad)
        assert far.rate == pytest.approx(pfa_closed_form(0.05, 10.0, 5.0, 16), abs=0.02)

    def test_empirical_far_needs_interior(self) -> None:
        params = DetectorParams(scale_a=0.05, offset_b=10.0, window_w=16, guard_per_side=2)
        with pytest.raises(ParameterError):
            empirical_false_alarm_rate(params, 5.0, num_profiles=10, profile_length=20)


# ---------------------------------------------------------------------------
# Scan-level expectations and goodness of fit
# ---------------------------------------------------------------------------


class TestExpectations:
    def test_expected_false_alarms_scalar(self) -> None:
        expected = expected_false_alarms(0.1, 10.0, NoiseModel(5.0), 40, shape=(10, 20))
        assert expected == pytest.approx(200 * pfa_closed_form(0.1, 10.0, 5.0, 40))

    def test_expected_false_alarms_field(self) -> None:
        field = np.linspace(5.0, 5.2, 30)[None, :].repeat(4, axis=0)
        expected = expected_false_alarms(0.1, 10.0, NoiseModel(field), 40)
        per_cell = [pfa_closed_form(0.1, 10.0, float(mu), 40) for mu in field.ravel()]
        assert expected == pytest.approx(sum(per_cell))

    def test_scalar_model_needs_shape(self) -> None:
        with pytest.raises(ParameterError, match="shape"):
            expected_false_alarms(0.1, 10.0, NoiseModel(5.0), 40)

    def test_ks_accepts_matching_distribution(self) -> None:
        samples = np.random.default_rng(11).exponential(3.0, size=2000)
        assert ks_exponential(samples, 3.0) > 1e-3

    def test_ks_rejects_wrong_mean(self) -> None:
        samples = np.random.default_rng(11).exponential(3.0, size=2000)
        assert ks_exponential(samples, 6.0) < 1e-6

    def test_ks_empty(self) -> None:
        with pytest.raises(ParameterError):
            ks_exponential([], 1.0)


# ---------------------------------------------------------------------------
# ROC
# ---------------------------------------------------------------------------


class TestRoc:
    def test_b_sweep_monotone(self) -> None:
        sweep = ThresholdSweep(SweepParameter.B, (20.0, 0.0, 5.0, 5.0, 10.0), fixed=0.05)
        points = roc_curve(sweep, 5.0, 10.0, 40)
        assert [p.param for p in points] == [0.0, 5.0, 10.0, 20.0]
        pfas = [p.pfa for p in points]
        pds = [p.pd for p in points]
        assert pfas == sorted(pfas, reverse=True)
        assert pds == sorted(pds, reverse=True)
        assert all(p.pd >= p.pfa for p in points)

    def test_a_sweep_uses_fixed_b(self) -> None:
        sweep = ThresholdSweep("a", (0.1,), fixed=10.0)
        (point,) = roc_curve(sweep, 5.0, 0.0, 40)
        assert point.pfa == pfa_closed_form(0.1, 10.0, 5.0, 40)
        assert point.pd == point.pfa

    def test_sweep_validation(self) -> None:
        with pytest.raises(ParameterError):
            ThresholdSweep(SweepParameter.A, ())
        with pytest.raises(ParameterError):
            ThresholdSweep(SweepParameter.A, (0.1, -0.1))
        with pytest.raises(ValueError):
            ThresholdSweep("c", (0.1,))


# ---------------------------------------------------------------------------
# Validation grid
# ---------------------------------------------------------------------------


class TestValidation:
    def test_default_grid_size(self) -> None:
        assert len(DEFAULT_VALIDATION_GRID) == 24
        assert {p.w for p in DEFAULT_VALIDATION_GRID} == {16, 40}

    def test_small_grid_passes(self) -> None:
        points = [
            ValidationPoint(0.05, 10.0, 5.0, 0.0, 16),
            ValidationPoint(0.05, 10.0, 5.0, 10.0, 16),
        ]
        rows = mc_validate(points, trials=50_000, seed=42)
        assert len(rows) == 2
        assert all(r.passed for r in rows)
        assert rows[1].closed_pfa == pd_closed_form(0.05, 10.0, 5.0, 10.0, 16)

    def test_rows_stable_when_points_added(self) -> None:
        first = ValidationPoint(0.05, 10.0, 5.0, 0.0, 16)
        one = mc_validate([first], trials=20_000, seed=9)
        two = mc_validate([first, ValidationPoint(0.1, 0.0, 5.0, 0.0, 16)], trials=20_000, seed=9)
        assert one[0] == two[0]

    def test_zero_band_fails(self) -> None:
        row = validate_point(ValidationPoint(0.05, 10.0, 5.0, 0.0, 16), 20_000, 1, sigmas=0.0)
        assert not row.passed

    def test_row_layout(self) -> None:
        row = validate_point(ValidationPoint(0.05, 10.0, 5.0, 0.0, 16), 20_000, 1)
        assert len(row.as_row()) == len(ValidationRow.HEADER)
        assert ValidationRow.HEADER[-1] == "pass"
