"""Study ingestion, z-statistics, and one-sided p-values."""

import math

import numpy as np
import pytest

from confcurve.data import CORTICOSTEROID_TRIALS
from confcurve.effects import (
    Study,
    log_or_from_counts,
    one_sided_p,
    study_from_counts,
    z_statistic,
)

PHI_1959964 = 0.9750000009035576

# displayed odds ratios and 95% CIs for the seven bundled trials
DISPLAYED = {
    "DEXA-COVID 19": (2.00, 0.21, 18.69),
    "CoDEX": (0.80, 0.49, 1.31),
    "RECOVERY": (0.59, 0.44, 0.78),
    "CAPE COVID": (0.46, 0.20, 1.04),
    "COVID STEROID": (4.00, 0.65, 24.66),
    "REMAP-CAP": (0.71, 0.38, 1.33),
    "Steroids-SARI": (0.91, 0.29, 2.87),
}


class TestLogOrFromCounts:
    def test_recovery_trial(self):
        est, se = log_or_from_counts(95, 324, 283, 683)
        z = 1.959964
        assert round(math.exp(est), 2) == 0.59
        assert round(math.exp(est - z * se), 2) == 0.44
        assert round(math.exp(est + z * se), 2) == 0.78

    def test_dexa_trial(self):
        est, _ = log_or_from_counts(2, 7, 2, 12)
        assert round(math.exp(est), 2) == 2.00

    def test_identical_arms(self):
        est, _ = log_or_from_counts(1, 2, 1, 2)
        assert est == 0.0

    def test_all_displayed_values(self):
        z = 1.959964
        for name, et, nt, ec, nc in CORTICOSTEROID_TRIALS:
            est, se = log_or_from_counts(et, nt, ec, nc)
            odds, lo, hi = DISPLAYED[name]
            assert round(math.exp(est), 2) == odds
            assert round(math.exp(est - z * se), 2) == lo
            assert round(math.exp(est + z * se), 2) == hi

    def test_zero_cell_is_hard_error(self):
        with pytest.raises(ValueError, match="exact"):
            log_or_from_counts(0, 10, 3, 12)
        with pytest.raises(ValueError, match="exact"):
            log_or_from_counts(5, 5, 3, 12)


class TestStudyValidation:
    def test_rejects_bad_se(self):
        with pytest.raises(ValueError):
            Study("s", 0.1, 0.0)
        with pytest.raises(ValueError):
            Study("s", 0.1, -1.0)

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            Study("s", 0.1, 1.0, counts=(5, 4, 1, 10))

    def test_from_counts_keeps_counts(self):
        s = study_from_counts("x", 2, 7, 2, 12)
        assert s.counts == (2, 7, 2, 12)
        assert s.estimate == pytest.approx(math.log(2.0))


class TestZStatistic:
    def test_plain(self):
        assert z_statistic(Study("a", 1.0, 2.0), 0.0) == 0.5

    def test_additive_adjustment(self):
        assert z_statistic(Study("a", 1.0, 1.0), 0.0, tau2=3.0) == 0.5

    def test_null_at_estimate(self):
        assert z_statistic(Study("a", 0.2, 0.1), 0.2) == 0.0

    def test_multiplicative_adjustment(self):
        assert z_statistic(Study("a", 2.0, 1.0), 0.0, phi=4.0) == 1.0

    def test_rejects_invalid_adjustments(self):
        s = Study("a", 1.0, 1.0)
        with pytest.raises(ValueError):
            z_statistic(s, 0.0, tau2=-0.1)
        with pytest.raises(ValueError):
            z_statistic(s, 0.0, phi=0.5)
        with pytest.raises(ValueError):
            z_statistic(s, 0.0, tau2=1.0, phi=2.0)


class TestOneSidedP:
    def test_center(self):
        assert one_sided_p(0.0, "greater") == 0.5

    def test_erf_oracle(self):
        assert abs(one_sided_p(1.959964, "less") - PHI_1959964) < 1e-12

    def test_orientations_sum_to_one(self):
        z = -0.7
        assert one_sided_p(z, "greater") + one_sided_p(z, "less") == pytest.approx(1.0, abs=1e-15)

    def test_rejects_unknown_orientation(self):
        with pytest.raises(ValueError):
            one_sided_p(0.0, "two-sided")

    def test_monotonicity_in_mu(self):
        s = Study("a", 0.3, 0.7)
        mu = np.linspace(-4, 4, 501)
        p_greater = np.array([one_sided_p(z_statistic(s, m), "greater") for m in mu])
        p_less = np.array([one_sided_p(z_statistic(s, m), "less") for m in mu])
        assert np.all(np.diff(p_greater) >= 0)
        assert np.all(np.diff(p_less) <= 0)
