"""Classical comparators: fixed effect, DL random effects, Hartung-Knapp.

All three produce intervals of the form estimate +/- additive factor,
hence exactly symmetric around the point estimate.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .heterogeneity import tau2_dl, tau2_reml
from .special import std_normal_cdf, std_normal_quantile, student_t_cdf, student_t_quantile

__all__ = ["ClassicResult", "fixed_effect", "dl_random_effects", "hartung_knapp"]


@dataclass(frozen=True)
class ClassicResult:
    estimate: float
    se: float
    lower: float
    upper: float
    p_null: float
    method: str  # fixed | dl | hk
    tau2_used: float


def _arrays(studies):
    est = np.array([s.estimate for s in studies], dtype=float)
    se = np.array([s.se for s in studies], dtype=float)
    return est, se


def _resolve_tau2(studies, tau2_estimator):
    if tau2_estimator == "dl":
        return tau2_dl(studies)
    if tau2_estimator == "reml":
        return tau2_reml(studies).tau2
    raise ValueError(f"unknown tau2 estimator {tau2_estimator!r}")


def fixed_effect(studies, level=0.95):
    """Inverse-variance weighted common-effect meta-analysis."""
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    est, se = _arrays(studies)
    w = 1.0 / se**2
    estimate = float(np.sum(w * est) / np.sum(w))
    pooled_se = float(1.0 / np.sqrt(np.sum(w)))
    z = std_normal_quantile(1.0 - (1.0 - level) / 2.0)
    p_null = 2.0 * (1.0 - std_normal_cdf(abs(estimate / pooled_se)))
    return ClassicResult(
        estimate=estimate,
        se=pooled_se,
        lower=estimate - z * pooled_se,
        upper=estimate + z * pooled_se,
        p_null=p_null,
        method="fixed",
        tau2_used=0.0,
    )


def dl_random_effects(studies, level=0.95, tau2_estimator="reml"):
    """Random effects meta-analysis with inverse (se^2 + tau2) weights.

    The between-study variance comes from the requested estimator; with
    tau2 = 0 the result coincides with :func:`fixed_effect` exactly.
    """
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    est, se = _arrays(studies)
    if est.size < 2:
        raise ValueError("dl_random_effects requires at least two studies")
    tau2 = _resolve_tau2(studies, tau2_estimator)
    w = 1.0 / (se**2 + tau2)
    estimate = float(np.sum(w * est) / np.sum(w))
    pooled_se = float(1.0 / np.sqrt(np.sum(w)))
    z = std_normal_quantile(1.0 - (1.0 - level) / 2.0)
    p_null = 2.0 * (1.0 - std_normal_cdf(abs(estimate / pooled_se)))
    return ClassicResult(
        estimate=estimate,
        se=pooled_se,
        lower=estimate - z * pooled_se,
        upper=estimate + z * pooled_se,
        p_null=p_null,
        method="dl",
        tau2_used=tau2,
    )


def hartung_knapp(studies, level=0.95, tau2_estimator="reml"):
    """Hartung-Knapp random effects meta-analysis.

    Same point estimate as :func:`dl_random_effects` but with the
    weighted residual variance q = sum w (y - estimate)^2 / (k - 1) in
    the standard error and t_{k-1} quantiles in the interval.  The
    variance is deliberately not floored at the naive one, so the
    interval can be narrower than the DL interval.
    """
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    est, se = _arrays(studies)
    k = est.size
    if k < 2:
        raise ValueError("hartung_knapp requires at least two studies")
    tau2 = _resolve_tau2(studies, tau2_estimator)
    w = 1.0 / (se**2 + tau2)
    estimate = float(np.sum(w * est) / np.sum(w))
    q_hk = float(np.sum(w * (est - estimate) ** 2) / (k - 1))
    if q_hk == 0.0:
        warnings.warn(
            "all study estimates identical: Hartung-Knapp interval degenerates "
            "to zero width",
            stacklevel=2,
        )
        return ClassicResult(
            estimate=estimate,
            se=0.0,
            lower=estimate,
            upper=estimate,
            p_null=0.0 if estimate != 0 else 1.0,
            method="hk",
            tau2_used=tau2,
        )
    hk_se = float(np.sqrt(q_hk / np.sum(w)))
    tq = student_t_quantile(1.0 - (1.0 - level) / 2.0, k - 1)
    p_null = 2.0 * (1.0 - student_t_cdf(abs(estimate / hk_se), k - 1))
    return ClassicResult(
        estimate=estimate,
        se=hk_se,
        lower=estimate - tq * hk_se,
        upper=estimate + tq * hk_se,
        p_null=p_null,
        method="hk",
        tau2_used=tau2,
    )
