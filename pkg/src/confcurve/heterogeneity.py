"""Between-study heterogeneity: Cochran's Q, I^2, tau^2 (DL/REML), phi."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "HeterogeneityEstimate",
    "cochran_q",
    "higgins_i2",
    "tau2_dl",
    "tau2_reml",
    "phi_multiplicative",
    "estimate_heterogeneity",
]

_REML_TOL = 1e-10
_REML_MAX_ITER = 1000


@dataclass(frozen=True)
class HeterogeneityEstimate:
    q: float
    i2: float
    tau2: float
    estimator: str  # none | dl | reml
    phi: float
    iterations: int
    converged: bool


def _arrays(studies):
    est = np.array([s.estimate for s in studies], dtype=float)
    se = np.array([s.se for s in studies], dtype=float)
    return est, se


def cochran_q(studies):
    """Cochran's Q: inverse-variance weighted squared deviations from the
    weighted mean."""
    est, se = _arrays(studies)
    if est.size < 2:
        raise ValueError("cochran_q requires at least two studies")
    w = 1.0 / se**2
    mean = np.sum(w * est) / np.sum(w)
    return float(np.sum(w * (est - mean) ** 2))


def higgins_i2(q, k):
    """Relative heterogeneity max{Q - (k-1), 0} / Q, defined as 0 when Q = 0."""
    if q < 0:
        raise ValueError("q must be nonnegative")
    if k < 2:
        raise ValueError("higgins_i2 requires k >= 2")
    if q == 0:
        return 0.0
    return max(q - (k - 1), 0.0) / q


def tau2_dl(studies):
    """DerSimonian-Laird moment estimator of the between-study variance."""
    est, se = _arrays(studies)
    k = est.size
    if k < 2:
        raise ValueError("tau2_dl requires at least two studies")
    w = 1.0 / se**2
    q = cochran_q(studies)
    s1 = np.sum(w)
    s2 = np.sum(w**2)
    return max((q - (k - 1)) / (s1 - s2 / s1), 0.0)


def tau2_reml(studies):
    """REML estimate of the between-study variance.

    Fixed-point iteration starting at the DL estimate:

        tau2 <- max{0, sum w^2 [(y - mu)^2 - se^2] / sum w^2 + 1 / sum w}

    with w = 1/(se^2 + tau2) and mu the w-weighted mean, stopped when the
    update moves by no more than 1e-10 (at most 1000 iterations; a run
    hitting the cap is returned with converged=False).
    """
    est, se = _arrays(studies)
    k = est.size
    if k < 2:
        raise ValueError("tau2_reml requires at least two studies")
    q = cochran_q(studies)
    tau2 = tau2_dl(studies)
    converged = False
    iterations = 0
    for iterations in range(1, _REML_MAX_ITER + 1):
        w = 1.0 / (se**2 + tau2)
        mu = np.sum(w * est) / np.sum(w)
        update = np.sum(w**2 * ((est - mu) ** 2 - se**2)) / np.sum(w**2) + 1.0 / np.sum(w)
        update = max(update, 0.0)
        if abs(update - tau2) <= _REML_TOL:
            tau2 = update
            converged = True
            break
        tau2 = update
    return HeterogeneityEstimate(
        q=q,
        i2=higgins_i2(q, k),
        tau2=float(tau2),
        estimator="reml",
        phi=phi_multiplicative(q, k),
        iterations=iterations,
        converged=converged,
    )


def phi_multiplicative(q, k):
    """Overdispersion estimate max{Q/(k-1), 1} for multiplicative adjustment."""
    if k < 2:
        raise ValueError("phi_multiplicative requires k >= 2")
    return max(q / (k - 1), 1.0)


def estimate_heterogeneity(studies, estimator="reml"):
    """One-stop summary with the requested tau^2 estimator."""
    if estimator == "reml":
        return tau2_reml(studies)
    if estimator == "dl":
        q = cochran_q(studies)
        k = len(studies)
        return HeterogeneityEstimate(
            q=q,
            i2=higgins_i2(q, k),
            tau2=tau2_dl(studies),
            estimator="dl",
            phi=phi_multiplicative(q, k),
            iterations=0,
            converged=True,
        )
    raise ValueError(f"unknown tau2 estimator {estimator!r}")
