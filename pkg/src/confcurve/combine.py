"""Combination rules for one-sided p-values and their lift to functions of mu.

The five supported rules, for one-sided input p-values p_1 .. p_k:

=========== ===============================================
edgington   F_IH(sum p_i; k), the sum-of-uniforms CDF
fisher      Pr(chi2_{2k} > -2 sum log p_i)
pearson     Pr(chi2_{2k} <= -2 sum log(1 - p_i))
tippett     1 - (1 - min p_i)^k
wilkinson   (max p_i)^k
=========== ===============================================

Only one-sided inputs are supported.  Two-sided inputs would make the
combined function multimodal (or keep it from peaking at 1), producing
empty or disconnected confidence sets, so they are deliberately rejected
by construction: callers choose an orientation, never a two-sidedness.
"""

from __future__ import annotations

import numpy as np

from .effects import ORIENTATIONS, Study, effective_se, _check_orientation
from .special import chi2_cdf, chi2_sf, irwin_hall_cdf, std_normal_cdf

__all__ = ["METHODS", "combine_p", "PValueFunction", "make_pfunction"]

METHODS = ("edgington", "fisher", "pearson", "tippett", "wilkinson")

# floor for log arguments; keeps intermediates finite without moving any
# representable result
_LOG_FLOOR = 1e-300


def _check_method(method):
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")


def _combine_matrix(method, p):
    """Combine a (n_mu, k) matrix of one-sided p-values along axis 1."""
    k = p.shape[1]
    if method == "edgington":
        return irwin_hall_cdf(p.sum(axis=1), k)
    if method == "fisher":
        stat = -2.0 * np.sum(np.log(np.clip(p, _LOG_FLOOR, None)), axis=1)
        out = chi2_sf(stat, 2 * k)
        return np.where(np.any(p == 0.0, axis=1), 0.0, out)
    if method == "pearson":
        stat = -2.0 * np.sum(np.log(np.clip(1.0 - p, _LOG_FLOOR, None)), axis=1)
        out = chi2_cdf(stat, 2 * k)
        return np.where(np.any(p == 1.0, axis=1), 1.0, out)
    if method == "tippett":
        return 1.0 - (1.0 - np.min(p, axis=1)) ** k
    if method == "wilkinson":
        return np.max(p, axis=1) ** k
    raise ValueError(f"unknown method {method!r}")


def combine_p(method, pvalues):
    """Combine one-sided p-values from k >= 1 studies into one p-value.

    Boundary limits hold without evaluating log(0): any p_i = 0 gives 0
    under Fisher's rule and any p_i = 1 gives 1 under Pearson's.
    """
    _check_method(method)
    p = np.asarray(pvalues, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise ValueError("pvalues must be a non-empty 1-D sequence")
    if np.any(p < 0.0) or np.any(p > 1.0) or not np.all(np.isfinite(p)):
        raise ValueError("p-values must lie in [0, 1]")
    return float(_combine_matrix(method, p[None, :])[0])


class PValueFunction:
    """A deterministic, monotone map mu -> combined one-sided p-value.

    Instances are immutable after construction and safe to share across
    threads; evaluation caches nothing and recomputes on every call.
    For orientation ``greater`` the function increases from 0 to 1 in mu,
    for ``less`` it decreases from 1 to 0.

    Calling the object with a scalar returns a float; calling it with an
    array returns an array of the same shape.
    """

    def __init__(self, method, orientation, per_study, anchors, scales,
                 studies=None, tau2=0.0, phi=1.0):
        _check_method(method)
        _check_orientation(orientation)
        self.method = method
        self.orientation = orientation
        self.tau2 = float(tau2)
        self.phi = float(phi)
        self.studies = tuple(studies) if studies is not None else None
        self._per_study = per_study
        self._anchors = np.asarray(anchors, dtype=float)
        self._scales = np.asarray(scales, dtype=float)

    @property
    def k(self):
        return self._anchors.size

    def initial_bracket(self):
        """Default root-search bracket around the study estimates."""
        lo = float(self._anchors.min() - 10.0 * self._scales.max())
        hi = float(self._anchors.max() + 10.0 * self._scales.max())
        return lo, hi

    def study_pvalues(self, mu):
        """(n_mu, k) matrix of the per-study one-sided p-values."""
        mu_arr = np.atleast_1d(np.asarray(mu, dtype=float))
        return self._per_study(mu_arr)

    def __call__(self, mu):
        mu_arr = np.atleast_1d(np.asarray(mu, dtype=float))
        out = _combine_matrix(self.method, self._per_study(mu_arr))
        if np.isscalar(mu) or np.asarray(mu).ndim == 0:
            return float(out[0])
        return out.reshape(np.asarray(mu).shape)


def make_pfunction(studies, method, orientation, tau2=0.0, phi=1.0):
    """Combined p-value function from normal-approximation study p-values.

    Each study contributes the one-sided p-value of its z-statistic
    (estimate - mu) / sqrt(phi * se^2 + tau2) under the requested
    alternative; the chosen rule then pools them pointwise in mu.
    """
    studies = tuple(studies)
    if len(studies) < 1:
        raise ValueError("at least one study is required")
    if not all(isinstance(s, Study) for s in studies):
        raise TypeError("studies must be Study instances")
    estimates = np.array([s.estimate for s in studies])
    ses = np.array([s.se for s in studies])
    eff = effective_se(ses, tau2, phi)

    def per_study(mu_arr):
        z = (estimates[None, :] - mu_arr[:, None]) / eff[None, :]
        p_less = std_normal_cdf(z)
        return 1.0 - p_less if orientation == "greater" else p_less

    return PValueFunction(
        method,
        orientation,
        per_study,
        anchors=estimates,
        scales=eff,
        studies=studies,
        tau2=tau2,
        phi=phi,
    )
