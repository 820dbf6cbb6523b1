"""Special function tests against frozen high-precision and enumeration oracles."""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from confcurve.special import (
    SkewNormal,
    chi2_cdf,
    chi2_sf,
    irwin_hall_cdf,
    nc_hypergeom_pmf,
    nc_hypergeom_support,
    std_normal_cdf,
    std_normal_quantile,
    student_t_cdf,
    student_t_quantile,
)

# frozen from a 40-digit erf / incomplete-beta evaluation
PHI_1959964 = 0.9750000009035576
Z_975 = 1.9599639845400545
T_Q975_DF6 = 2.4469118511449700
CHI2_78240_DF4 = 0.9017577399207420


class TestStdNormal:
    def test_zero(self):
        assert std_normal_cdf(0.0) == 0.5

    def test_erf_oracle(self):
        assert abs(std_normal_cdf(1.959964) - PHI_1959964) < 1e-12

    def test_symmetry(self):
        assert std_normal_cdf(-2.3) == pytest.approx(1.0 - std_normal_cdf(2.3), abs=1e-15)

    def test_monotone(self):
        x = np.linspace(-8, 8, 2001)
        vals = std_normal_cdf(x)
        assert np.all(np.diff(vals) >= 0)
        assert np.all((vals >= 0) & (vals <= 1))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            std_normal_cdf(float("nan"))
        with pytest.raises(ValueError):
            std_normal_cdf(float("inf"))

    def test_quantile_median(self):
        assert std_normal_quantile(0.5) == 0.0

    def test_quantile_oracle(self):
        assert abs(std_normal_quantile(0.975) - Z_975) < 1e-10

    def test_round_trip(self):
        assert std_normal_quantile(std_normal_cdf(1.234)) == pytest.approx(1.234, abs=1e-9)
        for p in np.linspace(0.001, 0.999, 57):
            assert std_normal_cdf(std_normal_quantile(p)) == pytest.approx(p, abs=1e-10)

    def test_quantile_domain(self):
        for bad in (0.0, 1.0, -0.2, 1.3):
            with pytest.raises(ValueError):
                std_normal_quantile(bad)


class TestChi2:
    def test_at_zero(self):
        for df in (1, 2, 3.5, 14):
            assert chi2_cdf(0.0, df) == 0.0

    def test_df2_closed_form(self):
        x = 2.0 * math.log(5.0)
        assert chi2_cdf(x, 2) == pytest.approx(0.8, abs=1e-15)
        for xv in (0.1, 1.0, 3.7, 12.0):
            assert chi2_cdf(xv, 2) == -math.expm1(-xv / 2.0)

    def test_df4_closed_form_oracle(self):
        # survival of chi2_4 is exp(-x/2) (1 + x/2)
        assert abs(chi2_cdf(7.8240, 4) - CHI2_78240_DF4) < 1e-13

    def test_sf_complements_cdf(self):
        for x, df in ((0.7, 3), (5.0, 8), (12.3, 4)):
            assert chi2_sf(x, df) == pytest.approx(1.0 - chi2_cdf(x, df), abs=1e-14)

    def test_monotone_in_x(self):
        x = np.linspace(0, 40, 500)
        assert np.all(np.diff(chi2_cdf(x, 5)) >= 0)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            chi2_cdf(-0.1, 3)
        with pytest.raises(ValueError):
            chi2_cdf(1.0, 0)


class TestStudentT:
    def test_center(self):
        assert student_t_cdf(0.0, 7) == 0.5

    def test_cauchy_closed_form(self):
        assert student_t_cdf(1.0, 1) == pytest.approx(0.75, abs=1e-12)

    def test_quantile_oracle(self):
        assert abs(student_t_quantile(0.975, 6) - T_Q975_DF6) < 1e-9

    def test_round_trip(self):
        for df in (1, 4, 11.5):
            for p in (0.01, 0.3, 0.5, 0.86, 0.999):
                q = student_t_quantile(p, df)
                assert student_t_cdf(q, df) == pytest.approx(p, abs=1e-9)

    def test_rejects_invalid(self):
        with pytest.raises(ValueError):
            student_t_cdf(1.0, 0)
        with pytest.raises(ValueError):
            student_t_quantile(1.2, 5)


def _irwin_hall_exact_rational(s, k):
    """Exact rational evaluation of the alternating-sum formula."""
    s = Fraction(s).limit_denominator(10**9)
    if s <= 0:
        return 0.0
    if s >= k:
        return 1.0
    total = Fraction(0)
    for j in range(math.floor(s) + 1):
        total += (-1) ** j * math.comb(k, j) * (s - j) ** k
    return float(total / math.factorial(k))


class TestIrwinHall:
    def test_uniform_case(self):
        assert irwin_hall_cdf(0.5, 1) == 0.5

    def test_first_polynomial_piece(self):
        assert irwin_hall_cdf(0.3, 2) == pytest.approx(0.045, abs=1e-15)

    def test_symmetry_point(self):
        assert irwin_hall_cdf(2.5, 5) == pytest.approx(0.5, abs=1e-15)

    def test_clamping(self):
        assert irwin_hall_cdf(-0.5, 3) == 0.0
        assert irwin_hall_cdf(3.5, 3) == 1.0

    def test_rejects_bad_k(self):
        with pytest.raises(ValueError):
            irwin_hall_cdf(0.5, 0)

    # independent oracle: recursive quadrature of the uniform convolution,
    # values frozen from a 40-digit run (kink-limited accuracy ~1e-7)
    @pytest.mark.parametrize(
        "s,k,expected",
        [
            (0.3, 2, 0.045000042721314103),
            (1.2, 2, 0.67999982545628760),
            (0.8, 3, 0.085333310524921379),
            (1.5, 3, 0.5),
            (2.6, 3, 0.98933332889145126),
        ],
    )
    def test_quadrature_oracle(self, s, k, expected):
        assert irwin_hall_cdf(s, k) == pytest.approx(expected, abs=1e-6)

    def test_matches_exact_rational_formula(self):
        for k in range(2, 12):
            for s in np.linspace(0.05, k - 0.05, 37):
                exact = _irwin_hall_exact_rational(round(s, 6), k)
                assert irwin_hall_cdf(round(s, 6), k) == pytest.approx(exact, abs=1e-10)

    def test_symmetry_identity(self):
        for k in range(2, 12):
            s = np.linspace(0.0, float(k), 201)
            lhs = irwin_hall_cdf(s, k)
            rhs = 1.0 - irwin_hall_cdf(float(k) - s, k)
            assert np.max(np.abs(lhs - rhs)) <= 1e-12

    def test_normal_approx_quality_at_12(self):
        s = np.arange(0, 1201) / 100.0
        approx = irwin_hall_cdf(s, 12)
        exact = np.array([_irwin_hall_exact_rational(v, 12) for v in s])
        assert np.max(np.abs(approx - exact)) < 0.01

    def test_monotone(self):
        for k in (3, 7, 15):
            s = np.linspace(-1, k + 1, 500)
            assert np.all(np.diff(irwin_hall_cdf(s, k)) >= -1e-15)


def _central_hypergeom_enum(x, n1, n0, t):
    total = sum(
        math.comb(n1, v) * math.comb(n0, t - v)
        for v in range(max(0, t - n0), min(t, n1) + 1)
    )
    return math.comb(n1, x) * math.comb(n0, t - x) / total


class TestNcHypergeom:
    def test_central_case_matches_enumeration(self):
        for x in nc_hypergeom_support(7, 12, 4):
            assert nc_hypergeom_pmf(int(x), 7, 12, 4, 1.0) == pytest.approx(
                _central_hypergeom_enum(int(x), 7, 12, 4), abs=1e-13
            )

    def test_frozen_enumeration_value(self):
        assert nc_hypergeom_pmf(2, 7, 12, 4, 1.0) == pytest.approx(
            0.35758513931888545, abs=1e-13
        )

    def test_normalization(self):
        support = nc_hypergeom_support(15, 14, 8)
        total = sum(nc_hypergeom_pmf(int(x), 15, 14, 8, 2.5) for x in support)
        assert abs(total - 1.0) < 1e-12

    def test_matches_scipy(self):
        # independent implementation of the same conditional model
        for psi in (0.3, 1.0, 4.2):
            dist = stats.nchypergeom_fisher(15 + 14, 15, 8, psi)
            for x in nc_hypergeom_support(15, 14, 8):
                assert nc_hypergeom_pmf(int(x), 15, 14, 8, psi) == pytest.approx(
                    dist.pmf(int(x)), abs=1e-10
                )

    def test_stochastically_increasing_in_psi(self):
        support = nc_hypergeom_support(9, 11, 7)
        psis = [0.2, 0.5, 1.0, 2.0, 5.0, 20.0]
        for xfix in support[:-1]:
            cdfs = []
            for psi in psis:
                cdfs.append(
                    sum(nc_hypergeom_pmf(int(v), 9, 11, 7, psi) for v in support if v <= xfix)
                )
            assert np.all(np.diff(cdfs) <= 1e-12)

    def test_rejects_out_of_support(self):
        with pytest.raises(ValueError):
            nc_hypergeom_pmf(5, 7, 12, 4, 1.0)
        with pytest.raises(ValueError):
            nc_hypergeom_support(3, 4, 9)
        with pytest.raises(ValueError):
            nc_hypergeom_pmf(2, 7, 12, 4, 0.0)


class TestSkewNormal:
    def test_reduces_to_normal(self):
        sn = SkewNormal(xi=0.4, omega=1.7, alpha=0.0)
        x = np.linspace(-5, 6, 101)
        expected = stats.norm.pdf(x, 0.4, 1.7)
        assert np.max(np.abs(sn.pdf(x) - expected)) < 1e-14

    def test_pdf_matches_scipy(self):
        sn = SkewNormal(xi=-0.3, omega=0.8, alpha=3.5)
        x = np.linspace(-4, 4, 81)
        expected = stats.skewnorm.pdf(x, 3.5, loc=-0.3, scale=0.8)
        assert np.max(np.abs(sn.pdf(x) - expected)) < 1e-12

    def test_cdf_matches_owen_t_implementation(self):
        # scipy uses Owen's T; quadrature must agree to 1e-8
        sn = SkewNormal(xi=0.2, omega=0.16, alpha=8.0)
        for x in (0.05, 0.15, 0.2, 0.31, 0.5):
            assert sn.cdf(x) == pytest.approx(
                stats.skewnorm.cdf(x, 8.0, loc=0.2, scale=0.16), abs=1e-8
            )

    def test_quantile_round_trip(self):
        sn = SkewNormal(xi=1.0, omega=2.0, alpha=-4.0)
        assert sn.cdf(sn.quantile(0.5)) == pytest.approx(0.5, abs=1e-8)
        for p in (0.1, 0.77, 0.99):
            assert sn.cdf(sn.quantile(p)) == pytest.approx(p, abs=1e-8)

    def test_sampler_moments(self):
        from confcurve.simulate import skew_normal_params

        xi, omega = skew_normal_params(0.2, 0.1, 8.0)
        rng = np.random.default_rng(20240811)
        draws = SkewNormal(xi, omega, 8.0).sample(1_000_000, rng)
        assert draws.mean() == pytest.approx(0.2, abs=0.001)
        assert draws.std() == pytest.approx(0.1, abs=0.001)

    def test_rejects_bad_scale(self):
        with pytest.raises(ValueError):
            SkewNormal(0.0, 0.0, 1.0)
