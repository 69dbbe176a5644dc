import math

import numpy as np
import pytest

from helpers import fd_elasticities, random_profile, rel_err
from riskdemand.errors import CornerSolutionError, InfeasibleBudgetError, InputError, NumericalError
from riskdemand.multi_period import (
    CrossPriceClass,
    ElasticityReport,
    IncomeClass,
    MultiPeriodProfile,
    classify_cross,
    classify_income,
    cross_price_elasticity_mp,
    elasticity_report,
    income_elasticities,
    income_elasticity,
    kkt_residuals,
    own_price_elasticity_mp,
    price_elasticity_matrix,
    solve_allocation_closed,
    solve_allocation_numeric,
    utility_total,
    welfare_total,
)
from riskdemand.single_period import OwnPriceClass, SinglePeriodModel

PRICES = np.array([260.0, 520.0, 1040.0])


def exp_profile(a, d0, pi0):
    return MultiPeriodProfile.build("exponential", a, d0, pi0)


def exponential_closed_forms(profile):
    """Own, cross and income elasticities from the printed exponential expressions."""
    a, d0, pi = profile.a, profile.d0, profile.initial_prices
    T = len(a)
    E = np.empty((T, T))
    for i in range(T):
        S_i = np.sum(pi * a[i] / (pi[i] * a))
        E[i, i] = -1 / (a[i] * d0[i]) + (1 - a[i] * d0[i]) / (a[i] * d0[i] * S_i)
        for k in range(T):
            if k != i:
                E[i, k] = (1 - a[k] * d0[k]) / (a[i] * d0[i] * np.sum(pi * a[k] / (pi[k] * a)))
    EB = profile.budget_value / (a * d0 * np.sum(pi / a))
    return E, EB


class TestProfile:
    def test_needs_two_periods(self):
        with pytest.raises(InputError):
            MultiPeriodProfile.build("exponential", [1.0], [1.0], [100.0])

    def test_default_budget(self, residential):
        assert residential.budget is None
        assert residential.budget_value == 1820.0

    def test_quadratic_satiation_budget(self):
        p = MultiPeriodProfile.build("quadratic", [0.5, 0.5], [1, 1], [100, 100])
        assert p.with_budget(399.0).budget == 399.0
        with pytest.raises(InfeasibleBudgetError):
            p.with_budget(400.0)

    @pytest.mark.parametrize("budget", [0.0, -1.0, math.inf, math.nan])
    def test_bad_budget(self, residential, budget):
        with pytest.raises(InputError):
            residential.with_budget(budget)

    def test_labels(self, residential):
        assert residential.labels == ("off-peak", "mid-peak", "peak")
        assert MultiPeriodProfile(residential.periods).labels == ("p0", "p1", "p2")
        with pytest.raises(InputError):
            MultiPeriodProfile(residential.periods, labels=("x",))

    def test_rejects_non_models(self):
        with pytest.raises(InputError):
            MultiPeriodProfile((1, 2))

    def test_mixed_families_allowed(self):
        p = MultiPeriodProfile.build(["exponential", "quadratic"], [0.8, 0.5], [1, 1], [100, 200])
        alloc = solve_allocation_numeric(p)
        np.testing.assert_allclose(alloc.demands, [1, 1], rtol=1e-12)
        with pytest.raises(InputError):
            solve_allocation_closed(p)


class TestAllocationExamples:
    def test_fixed_point(self, residential, backend):
        alloc = solve_allocation_numeric(residential)
        np.testing.assert_allclose(alloc.demands, [1, 1, 1], rtol=1e-12)
        assert alloc.lam == pytest.approx(1.0, rel=1e-12)
        closed = solve_allocation_closed(residential)
        np.testing.assert_allclose(closed.demands, [1, 1, 1], rtol=1e-12)
        assert closed.lam == pytest.approx(1.0, rel=1e-12)

    def test_scenario_three(self, residential, backend):
        alloc = solve_allocation_numeric(residential, PRICES * 1.05, 1820 * 1.05)
        np.testing.assert_allclose(alloc.demands, [1, 1, 1], rtol=1e-9)

    def test_income_up(self, residential, backend):
        alloc = solve_allocation_numeric(residential, budget=1820 * 1.05)
        assert alloc.spend(PRICES) == pytest.approx(1911.0, rel=1e-12)
        assert np.all(alloc.demands > 1.0)
        assert alloc.lam < 1.0

    def test_mid_peak_up(self, residential, backend):
        prices = np.array([260.0, 546.0, 1040.0])
        num = solve_allocation_numeric(residential, prices)
        closed = solve_allocation_closed(residential, prices)
        assert rel_err(closed.demands, num.demands) < 1e-9
        assert closed.lam == pytest.approx(num.lam, rel=1e-9)
        assert num.spend(prices) == pytest.approx(1820.0, rel=1e-12)

    def test_wrong_price_shape(self, residential):
        with pytest.raises(InputError):
            solve_allocation_numeric(residential, [1.0, 2.0])
        with pytest.raises(InputError):
            solve_allocation_numeric(residential, [1.0, -2.0, 3.0])

    def test_closed_form_corner_raises(self, residential):
        with pytest.raises(CornerSolutionError) as info:
            solve_allocation_closed(residential, budget=20.0)
        assert np.any(info.value.demands <= 0)

    def test_welfare_and_utility_totals(self, residential):
        u = utility_total(residential, [1, 1, 1])
        assert welfare_total(residential, [1, 1, 1]) == pytest.approx(u - 1820.0, rel=1e-14)


class TestAllocationProperties:
    def test_calibration_fixed_point(self, rng):
        for _ in range(300):
            p = random_profile(rng)
            alloc = solve_allocation_numeric(p)
            assert rel_err(alloc.demands, p.d0) < 1e-9
            assert alloc.lam == pytest.approx(1.0, rel=1e-9)

    def test_homogeneity(self, rng):
        for _ in range(300):
            p = random_profile(rng)
            prices = p.initial_prices * rng.uniform(0.8, 1.2, size=len(p))
            B = p.default_budget * rng.uniform(0.7, 1.1)
            k = rng.uniform(0.2, 5.0)
            base = solve_allocation_numeric(p, prices, B).demands
            scaled = solve_allocation_numeric(p, prices * k, B * k).demands
            assert rel_err(scaled, base, floor=1e-12) < 1e-9

    def test_closed_matches_numeric_on_interior(self, rng, backend):
        checked = 0
        while checked < 1000:
            p = random_profile(rng)
            prices = p.initial_prices * rng.uniform(0.8, 1.2, size=len(p))
            num = solve_allocation_numeric(p, prices)
            if np.any(num.demands <= 0):
                continue
            closed = solve_allocation_closed(p, prices)
            assert rel_err(closed.demands, num.demands) < 1e-9
            assert closed.lam == pytest.approx(num.lam, rel=1e-9)
            assert num.spend(prices) == pytest.approx(p.budget_value, rel=1e-9)
            checked += 1

    def test_corner_cases(self, rng, backend):
        corners = 0
        while corners < 100:
            p = random_profile(rng, family="exponential", a_range=(0.2, 2.5))
            prices = p.initial_prices * rng.uniform(0.5, 2.0, size=len(p))
            B = p.default_budget * rng.uniform(0.01, 0.3)
            alloc = solve_allocation_numeric(p, prices, B)
            if not np.any(alloc.demands == 0):
                continue
            corners += 1
            assert np.all(alloc.demands >= 0)
            assert alloc.spend(prices) == pytest.approx(B, rel=1e-9)
            res = kkt_residuals(p, alloc, prices)
            assert np.all(np.abs(res) < 1e-9)

    def test_quadratic_clamps_near_satiation(self, rng, backend):
        for _ in range(100):
            p = random_profile(rng, family="quadratic")
            prices = p.initial_prices * rng.uniform(0.8, 1.2, size=len(p))
            ceiling = float(np.sum(prices / p.a))
            B = ceiling * rng.uniform(0.9, 0.999999)
            alloc = solve_allocation_numeric(p, prices, B)
            assert np.all(alloc.demands >= 0)
            assert np.all(alloc.demands <= 1 / p.a * (1 + 1e-12))
            assert alloc.spend(prices) == pytest.approx(B, rel=1e-9)

    def test_lambda_decreases_with_budget(self, rng):
        for _ in range(200):
            p = random_profile(rng)
            b1, b2 = np.sort(rng.uniform(0.3, 0.99, size=2)) * p.default_budget
            assert solve_allocation_numeric(p, budget=b1).lam >= solve_allocation_numeric(p, budget=b2).lam


class TestElasticityExamples:
    def test_residential_off_peak_row(self, residential):
        E = price_elasticity_matrix(residential)
        # printed exponential expressions evaluated in mpmath at 30 digits
        np.testing.assert_allclose(E[0], [-1.1785921205098494, -0.13383545770567787, 0.0075318655851680185],
                                   rtol=1e-12)
        assert round(E[0, 0], 4) == -1.1786

    def test_residential_income(self, residential):
        EB = income_elasticities(residential)
        np.testing.assert_allclose(EB, [1.3, 0.68, 1.08], atol=0.01)
        np.testing.assert_allclose(EB, [1.3048957126303592, 0.6859067207415991, 1.0808227114716107], rtol=1e-12)

    def test_matches_printed_exponential_forms(self, residential):
        E_ref, EB_ref = exponential_closed_forms(residential)
        np.testing.assert_allclose(price_elasticity_matrix(residential), E_ref, rtol=1e-12, atol=1e-15)
        np.testing.assert_allclose(income_elasticities(residential), EB_ref, rtol=1e-12)

    def test_unit_product_kills_second_term(self):
        p = exp_profile([2.0, 0.7, 1.3], [0.5, 1.0, 1.0], PRICES)
        assert own_price_elasticity_mp(p, 0) == pytest.approx(-1.0, rel=1e-12)
        assert cross_price_elasticity_mp(p, 1, 0) == pytest.approx(0.0, abs=1e-15)
        assert cross_price_elasticity_mp(p, 2, 0) == pytest.approx(0.0, abs=1e-15)

    def test_scalar_accessors(self, residential):
        E = price_elasticity_matrix(residential)
        assert own_price_elasticity_mp(residential, 1) == E[1, 1]
        assert cross_price_elasticity_mp(residential, 0, 2) == E[0, 2]
        assert income_elasticity(residential, 2) == income_elasticities(residential)[2]

    def test_index_errors(self, residential):
        with pytest.raises(InputError):
            cross_price_elasticity_mp(residential, 1, 1)
        with pytest.raises(InputError):
            own_price_elasticity_mp(residential, 3)
        with pytest.raises(InputError):
            income_elasticity(residential, -1)

    def test_report(self, residential):
        rep = elasticity_report(residential, name="residential")
        assert rep.max_residual < 1e-9
        assert rep.income_classes == [IncomeClass.LUXURY, IncomeClass.NORMAL, IncomeClass.LUXURY]
        assert rep.cross_classes[0][1] is CrossPriceClass.COMPLEMENTARY
        assert rep.cross_classes[0][2] is CrossPriceClass.SUBSTITUTE
        assert rep.cross_classes[0][0] is None
        assert all(c is OwnPriceClass.ELASTIC or c is OwnPriceClass.INELASTIC for c in rep.own_classes)
        assert ElasticityReport.from_dict(rep.to_dict()) == rep

    def test_report_at_explicit_budget(self, residential):
        rep = elasticity_report(residential.with_budget(1900.0))
        assert rep.max_residual < 1e-9

    def test_corner_has_no_elasticities(self, residential):
        with pytest.raises(CornerSolutionError):
            price_elasticity_matrix(residential.with_budget(20.0))


class TestElasticityProperties:
    def test_identity(self, rng):
        for _ in range(1000):
            p = random_profile(rng, T=int(rng.integers(2, 5)))
            E = price_elasticity_matrix(p)
            EB = income_elasticities(p)
            assert np.max(np.abs(E.sum(axis=1) + EB)) < 1e-9

    def test_diagonal_negative(self, rng):
        for _ in range(500):
            p = random_profile(rng)
            assert np.all(np.diag(price_elasticity_matrix(p)) < 0)

    @pytest.mark.parametrize("family", ["exponential", "quadratic"])
    def test_finite_difference_agreement(self, rng, family):
        for _ in range(100):
            p = random_profile(rng, family=family)
            E_fd, EB_fd = fd_elasticities(p)
            E = price_elasticity_matrix(p)
            EB = income_elasticities(p)
            scale = np.max(np.abs(E))
            np.testing.assert_allclose(E, E_fd, rtol=1e-5, atol=1e-9 * scale)
            np.testing.assert_allclose(EB, EB_fd, rtol=1e-5)

    def test_finite_difference_off_default_budget(self, rng):
        for _ in range(50):
            p = random_profile(rng, budget_factor=rng.uniform(0.8, 1.1))
            if np.any(solve_allocation_numeric(p).demands <= 0):
                continue
            E_fd, EB_fd = fd_elasticities(p)
            np.testing.assert_allclose(price_elasticity_matrix(p), E_fd, rtol=1e-5,
                                       atol=1e-9 * np.max(np.abs(E_fd)))
            np.testing.assert_allclose(income_elasticities(p), EB_fd, rtol=1e-5)

    def test_printed_exponential_forms(self, rng):
        for _ in range(500):
            p = random_profile(rng, family="exponential")
            E_ref, EB_ref = exponential_closed_forms(p)
            np.testing.assert_allclose(price_elasticity_matrix(p), E_ref, rtol=1e-10, atol=1e-12)
            np.testing.assert_allclose(income_elasticities(p), EB_ref, rtol=1e-12)

    def test_sign_law(self, rng):
        for _ in range(1000):
            p = random_profile(rng, family="exponential")
            E = price_elasticity_matrix(p)
            expected = np.sign(1 - p.a * p.d0)
            T = len(p)
            for i in range(T):
                for k in range(T):
                    if i != k:
                        assert np.sign(E[i, k]) == expected[k]

    def test_quadratic_income_proportional_to_own_single_period(self, rng):
        # E_IB * |single-period E_I| ratio is shared across periods
        for _ in range(200):
            p = random_profile(rng, family="quadratic")
            EB = income_elasticities(p)
            sp = np.array([(1 - x) / x for x in p.a * p.d0])
            ratio = EB / sp
            assert np.ptp(ratio) <= 1e-9 * np.max(ratio)


class TestClassifiers:
    @pytest.mark.parametrize("e,cls", [
        (0.00753, CrossPriceClass.SUBSTITUTE),
        (0.0, CrossPriceClass.INDEPENDENT),
        (-0.1338, CrossPriceClass.COMPLEMENTARY),
        (1e-12, CrossPriceClass.INDEPENDENT),
        (-1e-12, CrossPriceClass.INDEPENDENT),
        (2e-9, CrossPriceClass.SUBSTITUTE),
        (-2e-9, CrossPriceClass.COMPLEMENTARY),
    ])
    def test_cross(self, e, cls):
        assert classify_cross(e) is cls

    @pytest.mark.parametrize("e,cls", [
        (0.68, IncomeClass.NORMAL),
        (1.3, IncomeClass.LUXURY),
        (-0.1, IncomeClass.INFERIOR),
        (0.0, IncomeClass.NORMAL),
        (1.0, IncomeClass.NORMAL),
        (1.0 + 1e-12, IncomeClass.NORMAL),
        (1.0 - 1e-12, IncomeClass.NORMAL),
        (-1e-12, IncomeClass.NORMAL),
        (1e-12, IncomeClass.NORMAL),
        (1.0 + 2e-9, IncomeClass.LUXURY),
        (-2e-9, IncomeClass.INFERIOR),
    ])
    def test_income(self, e, cls):
        assert classify_income(e) is cls


def test_identity_violation_is_numerical_error(residential, monkeypatch):
    import riskdemand.multi_period as mp

    real = mp.income_elasticities
    monkeypatch.setattr(mp, "income_elasticities", lambda p: real(p) + 1e-6)
    with pytest.raises(NumericalError):
        mp.elasticity_report(residential)


def test_single_period_models_reused(residential):
    assert all(isinstance(p, SinglePeriodModel) for p in residential.periods)
