import numpy as np
import pytest

from cesnet.economy import Economy
from cesnet.equilibrium import solve_fixed_point
from cesnet.errors import NonPositivePrice
from cesnet.household import (
    COBB_DOUGLAS,
    GENERAL_CES,
    LEONTIEF,
    HouseholdPrefs,
    Unviable,
    domar_weights,
    log_price_index,
    nominal_income,
    price_index,
    real_gdp_growth,
)

from conftest import random_economy, random_shares


class TestPriceIndex:
    def test_one_at_unit_prices(self):
        for kappa in (-1.0, 0.0, 0.5, 1.0):
            prefs = HouseholdPrefs(mu=random_shares(0, 5), kappa=kappa)
            assert price_index(np.ones(5), prefs) == pytest.approx(1.0)

    def test_geometric_mean_at_kappa_zero(self):
        prefs = HouseholdPrefs(mu=[0.5, 0.5], kappa=0.0)
        assert price_index(np.array([1.0, 4.0]), prefs) == pytest.approx(2.0)

    def test_arithmetic_mean_at_kappa_one(self):
        prefs = HouseholdPrefs(mu=[0.5, 0.5], kappa=1.0)
        assert price_index(np.array([1.0, 3.0]), prefs) == pytest.approx(2.0)

    def test_degree_one_homogeneity(self):
        prefs = HouseholdPrefs(mu=random_shares(1, 4), kappa=-0.7)
        pi = np.random.default_rng(1).uniform(0.5, 2.0, 4)
        assert price_index(3.0 * pi, prefs) == pytest.approx(
            3.0 * price_index(pi, prefs)
        )

    def test_kappa_log_limit_continuity(self):
        mu = random_shares(2, 4)
        pi = np.random.default_rng(2).uniform(0.5, 2.0, 4)
        lo = log_price_index(pi, HouseholdPrefs(mu=mu, kappa=1e-12))
        cd = log_price_index(pi, HouseholdPrefs(mu=mu, kappa=0.0))
        assert lo == pytest.approx(cd, rel=1e-9)

    def test_rejects_nonpositive_prices(self):
        prefs = HouseholdPrefs(mu=[1.0], kappa=0.5)
        with pytest.raises(NonPositivePrice):
            price_index(np.array([0.0]), prefs)

    def test_prefs_validation(self):
        with pytest.raises(ValueError):
            HouseholdPrefs(mu=[0.4, 0.4])
        with pytest.raises(ValueError):
            HouseholdPrefs(mu=[1.2, -0.2])


class TestNominalIncome:
    def test_unit_shock_gives_h_prev(self):
        prefs = HouseholdPrefs(mu=random_shares(3, 3), kappa=0.3)
        assert nominal_income(np.ones(3), prefs, H_prev=1.7) == pytest.approx(1.7)

    def test_harmonic_oracle(self):
        # kappa = 1 on reciprocal prices: W = mu . (1/z).
        prefs = HouseholdPrefs(mu=[0.25, 0.75], kappa=1.0)
        z = np.array([2.0, 0.5])
        assert nominal_income(z, prefs) == pytest.approx(0.25 / 2.0 + 0.75 / 0.5)


class TestRealGdpGrowth:
    def test_zero_growth_without_intermediates(self):
        e = Economy(
            labels=("a", "b"),
            A=[[0.0, 0.0], [0.0, 0.0]],
            a0=[1.0, 1.0],
            gamma=[0.5, -0.5],
        )
        prefs = HouseholdPrefs(mu=[0.5, 0.5], kappa=0.4)
        z = np.array([1.4, 0.7])
        for method in (GENERAL_CES, LEONTIEF, COBB_DOUGLAS):
            assert real_gdp_growth(e, prefs, z, method) == pytest.approx(0.0, abs=1e-10)

    def test_methods_agree_at_their_elasticities(self):
        prefs = HouseholdPrefs(mu=random_shares(4, 4), kappa=0.2)
        rng = np.random.default_rng(4)
        z = np.exp(0.1 * rng.standard_normal(4))
        e_leon = random_economy(4, 4, gamma=1.0)
        assert real_gdp_growth(e_leon, prefs, z, GENERAL_CES) == pytest.approx(
            real_gdp_growth(e_leon, prefs, z, LEONTIEF), abs=1e-8
        )
        e_cd = random_economy(4, 4, gamma=0.0)
        assert real_gdp_growth(e_cd, prefs, z, GENERAL_CES) == pytest.approx(
            real_gdp_growth(e_cd, prefs, z, COBB_DOUGLAS), abs=1e-8
        )

    def test_unviable_returned_not_raised(self):
        e = random_economy(5, 2, gamma=1.0)
        prefs = HouseholdPrefs(mu=[0.5, 0.5])
        out = real_gdp_growth(e, prefs, np.array([0.01, 0.01]), LEONTIEF)
        assert isinstance(out, Unviable)
        assert out.method == LEONTIEF
        out = real_gdp_growth(e, prefs, np.array([0.01, 0.01]), GENERAL_CES)
        assert isinstance(out, Unviable)

    def test_unknown_method_raises(self, econ4):
        prefs = HouseholdPrefs(mu=random_shares(0, 4))
        with pytest.raises(ValueError):
            real_gdp_growth(econ4, prefs, np.ones(4), "translog")


class TestDomarWeights:
    def test_no_intermediates_means_zero_weights(self):
        e = Economy(
            labels=("a", "b"),
            A=[[0.0, 0.0], [0.0, 0.0]],
            a0=[1.0, 1.0],
            gamma=[0.0, 0.0],
        )
        np.testing.assert_allclose(
            domar_weights(e, np.array([0.5, 0.5])), [0.0, 0.0], atol=1e-15
        )

    def test_single_sector_oracle(self):
        e = Economy(labels=("a",), A=[[0.5]], a0=[0.5], gamma=[0.0])
        np.testing.assert_allclose(domar_weights(e, np.array([1.0])), [1.0])

    def test_exact_linearity_of_cobb_douglas_growth(self):
        for seed in range(4):
            e = random_economy(seed, 5, gamma=0.0)
            mu = random_shares(seed, 5)
            prefs = HouseholdPrefs(mu=mu, kappa=0.0)
            lam = domar_weights(e, mu)
            rng = np.random.default_rng(seed + 60)
            z = np.exp(0.3 * rng.standard_normal(5))
            ln_h = real_gdp_growth(e, prefs, z, COBB_DOUGLAS)
            assert ln_h == pytest.approx(float(lam @ np.log(z)), abs=1e-12)

    def test_rejects_bad_demand_shares(self, econ4):
        with pytest.raises(ValueError):
            domar_weights(econ4, np.array([0.5, 0.5, 0.5, 0.5]))
        with pytest.raises(ValueError):
            domar_weights(econ4, np.array([1.0, 0.0]))


class TestSpotChecks:
    def test_uniform_shock_scales_income(self):
        prefs = HouseholdPrefs(mu=random_shares(5, 3), kappa=-0.4)
        assert nominal_income(np.full(3, 2.0), prefs, H_prev=3.0) == pytest.approx(1.5)

    def test_direct_formula_evaluation(self):
        prefs = HouseholdPrefs(mu=[0.3, 0.7], kappa=0.5)
        z = np.array([1.2, 0.9])
        expected = (0.3 * (1 / 1.2) ** 0.5 + 0.7 * (1 / 0.9) ** 0.5) ** 2.0
        assert nominal_income(z, prefs) == pytest.approx(expected)

    def test_no_shock_means_no_growth_all_methods(self, econ4):
        prefs = HouseholdPrefs(mu=random_shares(0, 4), kappa=0.0)
        for method in (GENERAL_CES, LEONTIEF, COBB_DOUGLAS):
            assert real_gdp_growth(econ4, prefs, np.ones(4), method) == pytest.approx(
                0.0, abs=1e-10
            )

    def test_cobb_douglas_growth_is_linear_in_log_shocks(self):
        e = random_economy(6, 3, gamma=0.0)
        mu = random_shares(6, 3)
        prefs = HouseholdPrefs(mu=mu)
        z = np.exp(0.2 * np.random.default_rng(6).standard_normal(3))
        once = real_gdp_growth(e, prefs, z, COBB_DOUGLAS)
        twice = real_gdp_growth(e, prefs, z**2, COBB_DOUGLAS)
        assert twice == pytest.approx(2.0 * once, abs=1e-12)
