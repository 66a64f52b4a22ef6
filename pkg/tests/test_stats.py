"""ECDFs, sup distances, slopes, bootstrap medians, regressions."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from collide1d.distributions import DistributionSpec, SeedSpec, sample
from collide1d.limits import LawKind, LimitLaw
from collide1d.stats import (
    THROUGH_ORIGIN,
    WITH_INTERCEPT,
    EmpiricalCDF,
    bootstrap_median,
    fit_eps_regression,
    loglog_slope,
    poisson_count_check,
    sup_distance,
)

N01 = DistributionSpec.normal(0, 1)
SYS_LAW = LimitLaw(LawKind.SYSTEM_FINITE_MEAN, N01, N01)


class TestEmpiricalCDF:
    def test_step_values(self):
        f = EmpiricalCDF([1.0, 2.0, 3.0])
        assert f(0.5) == 0.0
        assert f(1.0) == pytest.approx(1 / 3)  # right-continuous at samples
        assert f(2.5) == pytest.approx(2 / 3)
        assert f(100.0) == 1.0

    def test_vectorized(self):
        f = EmpiricalCDF([1.0, 2.0])
        assert np.allclose(f(np.array([0.0, 1.5, 3.0])), [0.0, 0.5, 1.0])

    def test_permutation_invariant(self):
        a = EmpiricalCDF([3.0, 1.0, 2.0])
        b = EmpiricalCDF([1.0, 2.0, 3.0])
        xs = np.linspace(0, 4, 17)
        assert np.allclose(a(xs), b(xs))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            EmpiricalCDF([])


class TestSupDistance:
    def test_quantile_perfect_sample(self):
        n = 1000
        qs = (np.arange(n) + 0.5) / n
        c = SYS_LAW.constant()
        samples = c / -np.log(qs)  # law's own quantiles
        ecdf = EmpiricalCDF(samples)
        assert sup_distance(ecdf, SYS_LAW, (0.0, 50.0), grid=512) <= 0.5 / n + 1e-9

    def test_one_point_sample_exact(self):
        ecdf = EmpiricalCDF([1.0])
        f1 = SYS_LAW.cdf(1.0)
        want = max(1.0 - f1, f1)  # corner values of the single jump
        assert sup_distance(ecdf, SYS_LAW, (0.0, 5.0)) == pytest.approx(want, abs=1e-6)

    def test_accepts_plain_callable(self):
        ecdf = EmpiricalCDF([0.5])
        val = sup_distance(ecdf, lambda t: np.clip(t, 0.0, 1.0), (0.0, 2.0))
        assert val == pytest.approx(0.5, abs=1e-2)

    def test_drawn_from_law(self):
        rng = SeedSpec(77).stream()
        u = rng.random(10**6)
        samples = SYS_LAW.constant() / -np.log(u)
        d = sup_distance(EmpiricalCDF(samples), SYS_LAW, (0.0, 5.0))
        assert d <= 0.002  # DKW bound at 1e6 samples

    def test_bad_interval(self):
        with pytest.raises(ValueError):
            sup_distance(EmpiricalCDF([1.0]), SYS_LAW, (2.0, 1.0))


class TestLoglogSlope:
    def test_exact_inverse(self):
        pts = [(n, 7.0 / n) for n in (5, 10, 20, 40)]
        assert loglog_slope(pts) == pytest.approx(-1.0, abs=1e-12)

    def test_exact_power(self):
        pts = [(n, 3.0 * n ** -0.35) for n in (5, 10, 20, 40, 80)]
        assert loglog_slope(pts) == pytest.approx(-0.35, abs=1e-12)

    def test_needs_three_points(self):
        with pytest.raises(ValueError):
            loglog_slope([(10, 1.0), (20, 0.5)])

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            loglog_slope([(10, 1.0), (20, 0.5), (40, -0.1)])


class TestBootstrapMedian:
    def test_constant_sample(self):
        est = bootstrap_median(np.ones(50))
        assert est.point == 1.0
        assert est.ci_lo == 1.0 and est.ci_hi == 1.0

    def test_deterministic(self):
        samples = sample(N01, SeedSpec(5, 0), 500)
        a = bootstrap_median(samples, seed=SeedSpec(9))
        b = bootstrap_median(samples, seed=SeedSpec(9))
        assert a == b

    def test_even_n_midpoint(self):
        est = bootstrap_median(np.array([1.0, 2.0, 3.0, 4.0]))
        assert est.point == pytest.approx(2.5)

    def test_normal_method(self):
        samples = sample(N01, SeedSpec(6, 0), 500) + 5.0
        est = bootstrap_median(samples, method="normal", seed=SeedSpec(1))
        assert est.ci_lo <= est.point <= est.ci_hi
        assert est.ci_lo < 5.0 < est.ci_hi

    def test_coverage(self):
        # 99% percentile CI over 10^4 draws contains the true median
        # in nearly all repetitions
        hits = 0
        reps = 100
        for r in range(reps):
            samples = sample(DistributionSpec.normal(5, 1), SeedSpec(100, r), 10**4)
            est = bootstrap_median(samples, 0.99, 100, SeedSpec(200, r))
            hits += est.ci_lo <= 5.0 <= est.ci_hi
        assert hits >= 90

    def test_median_sd_scaling(self):
        # sd of the sample median shrinks like k^(-1/2)
        rng = SeedSpec(31).stream()
        pts = []
        for k in (100, 400, 1600, 6400):
            meds = np.median(rng.normal(size=(400, k)), axis=1)
            pts.append((k, float(np.std(meds))))
        assert -0.6 <= loglog_slope(pts) <= -0.4

    def test_bad_args(self):
        with pytest.raises(ValueError):
            bootstrap_median([])
        with pytest.raises(ValueError):
            bootstrap_median([1.0], confidence=1.5)
        with pytest.raises(ValueError):
            bootstrap_median([1.0], method="bca")


class TestEpsRegression:
    def test_through_origin_exact(self):
        xs = np.linspace(-0.5, 0.5, 9)
        pts = [(x, 0.3 * x + 0.02 * x * x) for x in xs]
        fit = fit_eps_regression(pts, THROUGH_ORIGIN)
        assert fit.coefficients == pytest.approx((0.3, 0.02), abs=1e-12)
        assert fit.residual_rms < 1e-12

    def test_with_intercept_exact(self):
        xs = np.linspace(0.1, 2.0, 9)
        pts = [(x, -0.5 + 0.02 * x + 0.3 * x * x) for x in xs]
        fit = fit_eps_regression(pts, WITH_INTERCEPT)
        assert fit.coefficients == pytest.approx((-0.5, 0.02, 0.3), abs=1e-10)

    def test_rank_deficiency(self):
        with pytest.raises(ValueError):
            fit_eps_regression([(0.0, 1.0), (0.0, 2.0), (0.0, 3.0)], THROUGH_ORIGIN)

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            fit_eps_regression([(1.0, 1.0)], THROUGH_ORIGIN)

    @given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
    @settings(max_examples=30, deadline=None)
    def test_exact_recovery_property(self, d0, d1, d2):
        xs = np.linspace(0.2, 3.0, 7)
        pts = [(x, d0 + d1 * x + d2 * x * x) for x in xs]
        fit = fit_eps_regression(pts, WITH_INTERCEPT)
        assert fit.coefficients == pytest.approx((d0, d1, d2), abs=1e-7)


class TestPoissonCheck:
    def test_all_zero_counts(self):
        mean_err, var_err = poisson_count_check(np.zeros(100), 1e-9)
        assert mean_err == pytest.approx(1e-9)
        assert var_err == pytest.approx(1e-9)

    def test_synthetic_poisson(self):
        rng = SeedSpec(44).stream()
        counts = rng.poisson(2.0, size=10**5)
        mean_err, var_err = poisson_count_check(counts, 2.0)
        assert mean_err < 0.05 and var_err < 0.05

    def test_bad_args(self):
        with pytest.raises(ValueError):
            poisson_count_check([], 1.0)
        with pytest.raises(ValueError):
            poisson_count_check([1], 0.0)
