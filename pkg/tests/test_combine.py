"""Combination rules and p-value functions of mu."""

import numpy as np
import pytest
from scipy import optimize

from confcurve.combine import METHODS, combine_p, make_pfunction
from confcurve.data import corticosteroid_studies
from confcurve.effects import Study

# frozen from the chi-squared survival closed form exp(-f/2)(1 + f/2)
FISHER_01_02 = 0.09824046010856292


class TestCombineP:
    def test_edgington_first_piece(self):
        assert combine_p("edgington", [0.1, 0.2]) == pytest.approx(0.045, abs=1e-15)

    def test_tippett(self):
        assert combine_p("tippett", [0.05, 0.3, 0.8]) == pytest.approx(0.142625, abs=1e-12)

    def test_fisher_closed_form_oracle(self):
        assert combine_p("fisher", [0.1, 0.2]) == pytest.approx(FISHER_01_02, abs=1e-12)

    def test_pearson_k1_reduction(self):
        assert combine_p("pearson", [0.3]) == pytest.approx(0.3, abs=1e-12)

    def test_wilkinson(self):
        assert combine_p("wilkinson", [0.5, 0.9, 0.1]) == pytest.approx(0.729, abs=1e-12)

    @pytest.mark.parametrize("method", METHODS)
    def test_k1_reduction_all_methods(self, method):
        for p in (0.01, 0.2, 0.5, 0.77, 0.99):
            assert combine_p(method, [p]) == pytest.approx(p, abs=1e-10)

    def test_fisher_boundary_zero(self):
        assert combine_p("fisher", [0.0, 0.5]) == 0.0

    def test_pearson_boundary_one(self):
        assert combine_p("pearson", [1.0, 0.5]) == 1.0

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            combine_p("fisher", [])
        with pytest.raises(ValueError):
            combine_p("fisher", [0.5, 1.2])
        with pytest.raises(ValueError):
            combine_p("fisher", [-0.1])
        with pytest.raises(ValueError):
            combine_p("stouffer", [0.5])


def _two_studies():
    return [Study("a", -0.4, 0.5), Study("b", 0.3, 0.25)]


class TestPValueFunction:
    def test_single_study_median(self):
        s = Study("one", 0.8, 0.4)
        for method in METHODS:
            f = make_pfunction([s], method, "greater")
            assert f(0.8) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("method", METHODS)
    def test_monotone_on_grid(self, method):
        studies = _two_studies()
        mu = np.linspace(-6, 6, 1000)
        up = make_pfunction(studies, method, "greater")(mu)
        down = make_pfunction(studies, method, "less")(mu)
        assert np.all(np.diff(up) >= -1e-14)
        assert np.all(np.diff(down) <= 1e-14)

    @pytest.mark.parametrize("method", METHODS)
    def test_limits(self, method):
        f = make_pfunction(_two_studies(), method, "greater")
        assert f(-40.0) < 1e-12
        assert f(40.0) > 1.0 - 1e-12

    def test_edgington_orientation_identity_single_point(self):
        studies = _two_studies()
        g = make_pfunction(studies, "edgington", "greater")
        l = make_pfunction(studies, "edgington", "less")
        assert g(-0.3) + l(-0.3) == pytest.approx(1.0, abs=1e-14)

    def test_orientation_identities_pointwise(self):
        # greater-oriented rule == 1 - mirrored less-oriented rule
        studies = corticosteroid_studies()
        mu = np.linspace(-2.5, 2.5, 1000)
        pairs = [
            ("edgington", "edgington"),
            ("fisher", "pearson"),
            ("pearson", "fisher"),
            ("tippett", "wilkinson"),
            ("wilkinson", "tippett"),
        ]
        for m_greater, m_less in pairs:
            lhs = make_pfunction(studies, m_greater, "greater")(mu)
            rhs = 1.0 - make_pfunction(studies, m_less, "less")(mu)
            assert np.max(np.abs(lhs - rhs)) <= 1e-12

    def test_edgington_median_property(self):
        # where the mean of the study p-values is 1/2, the combined value is 1/2
        studies = corticosteroid_studies()
        f = make_pfunction(studies, "edgington", "less")

        def mean_p(mu):
            return float(f.study_pvalues(mu).mean()) - 0.5

        mu_star = optimize.brentq(mean_p, -10, 10, xtol=1e-13)
        assert f(mu_star) == pytest.approx(0.5, abs=1e-9)

    def test_evaluator_shapes(self):
        f = make_pfunction(_two_studies(), "fisher", "less")
        assert isinstance(f(0.1), float)
        out = f(np.linspace(-1, 1, 7))
        assert out.shape == (7,)

    def test_heterogeneity_widens_function(self):
        studies = _two_studies()
        plain = make_pfunction(studies, "edgington", "greater")
        wide = make_pfunction(studies, "edgington", "greater", tau2=1.0)
        # adjusted function rises more slowly through the center
        assert wide(2.0) < plain(2.0)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            make_pfunction([], "fisher", "less")
