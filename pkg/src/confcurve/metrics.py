"""Skewness and agreement diagnostics for intervals, curves, and data."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

__all__ = [
    "beta_skewness",
    "gamma_weighted_skewness",
    "sign_category",
    "KappaResult",
    "cohen_kappa",
    "pearson_correlation",
]

# classical methods produce exact zeros, p-value methods exact nonzeros;
# a crisp zero class needs a threshold well below either
SIGN_TOL = 1e-12


def beta_skewness(estimate, lower, upper):
    """Interval skewness (upper + lower - 2 estimate) / (upper - lower).

    Lies in [-1, 1]: positive for right-skewed intervals, negative for
    left-skewed ones, zero for symmetric ones.
    """
    if not lower <= estimate <= upper:
        raise ValueError("requires lower <= estimate <= upper")
    if not lower < upper:
        raise ValueError("zero-width interval has no defined skewness")
    return (upper + lower - 2.0 * estimate) / (upper - lower)


def gamma_weighted_skewness(estimates, weights):
    """Weighted skewness coefficient of the study effect estimates.

    gamma = [sum w (y - ybar)^3 * sqrt(sum w)] / [sum w (y - ybar)^2]^{3/2}

    with ybar the w-weighted mean.  Callers choose the weights: 1/se^2
    unadjusted or 1/(se^2 + tau2) heterogeneity-adjusted.
    """
    y = np.asarray(estimates, dtype=float)
    w = np.asarray(weights, dtype=float)
    if y.size < 3:
        raise ValueError("weighted skewness requires at least three estimates")
    if y.shape != w.shape:
        raise ValueError("estimates and weights must have equal length")
    if np.any(w <= 0):
        raise ValueError("weights must be positive")
    ybar = np.sum(w * y) / np.sum(w)
    m2 = np.sum(w * (y - ybar) ** 2)
    if m2 <= 0:
        raise ValueError("degenerate dispersion: all estimates equal")
    return float(np.sum(w * (y - ybar) ** 3) * np.sqrt(np.sum(w)) / m2**1.5)


def sign_category(x, tol=SIGN_TOL):
    """Classify a value as -1, 0, or +1 with a small zero band."""
    if abs(x) < tol:
        return 0
    return 1 if x > 0 else -1


class KappaResult(NamedTuple):
    value: float
    degenerate: bool


def cohen_kappa(signs_a, signs_b):
    """Cohen's kappa over the three sign categories {-1, 0, +1}.

    When the expected agreement is one (both raters constant on the same
    category), kappa is defined as 1 for perfect agreement and 0
    otherwise, and the result is flagged degenerate.
    """
    a = np.asarray(signs_a, dtype=int)
    b = np.asarray(signs_b, dtype=int)
    if a.shape != b.shape or a.ndim != 1 or a.size < 1:
        raise ValueError("sign vectors must be equal-length and non-empty")
    for v in (a, b):
        if not np.all(np.isin(v, (-1, 0, 1))):
            raise ValueError("signs must be -1, 0, or +1")
    n = a.size
    p_obs = float(np.mean(a == b))
    p_exp = 0.0
    for cat in (-1, 0, 1):
        p_exp += (np.sum(a == cat) / n) * (np.sum(b == cat) / n)
    if p_exp >= 1.0 - 1e-15:
        return KappaResult(1.0 if p_obs == 1.0 else 0.0, True)
    return KappaResult((p_obs - p_exp) / (1.0 - p_exp), False)


def pearson_correlation(x, y):
    """Sample Pearson correlation; rejects degenerate (zero-variance) input."""
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape or xa.ndim != 1 or xa.size < 2:
        raise ValueError("inputs must be equal-length 1-D with at least two values")
    xc = xa - xa.mean()
    yc = ya - ya.mean()
    denom = np.sqrt(np.sum(xc**2) * np.sum(yc**2))
    if denom == 0:
        raise ValueError("correlation undefined: an input has zero variance")
    return float(np.sum(xc * yc) / denom)
