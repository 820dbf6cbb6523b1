"""Self-contained special functions and distributions used across the package.

Only the pieces the estimation machinery actually needs live here: the
standard normal and chi-squared/Student-t CDFs with their inverses, the
CDF of a sum of k independent uniform(0,1) variables, the conditional
(both-margins-fixed) noncentral hypergeometric distribution, and a small
skew-normal distribution object.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

__all__ = [
    "std_normal_cdf",
    "std_normal_quantile",
    "chi2_cdf",
    "chi2_sf",
    "student_t_cdf",
    "student_t_quantile",
    "irwin_hall_cdf",
    "nc_hypergeom_support",
    "nc_hypergeom_pmf",
    "SkewNormal",
]


def std_normal_cdf(x):
    """Standard normal CDF, accurate to well below 1e-12 absolute error.

    Accepts scalars or arrays; rejects non-finite input.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("std_normal_cdf requires finite input")
    out = special.ndtr(arr)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def std_normal_quantile(p):
    """Inverse of :func:`std_normal_cdf` for p in the open interval (0, 1)."""
    arr = np.asarray(p, dtype=float)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ValueError("std_normal_quantile requires 0 < p < 1")
    out = special.ndtri(arr)
    return float(out) if np.isscalar(p) or arr.ndim == 0 else out


def chi2_cdf(x, df):
    """Chi-squared CDF with df > 0 degrees of freedom, for x >= 0.

    The df=2 case is evaluated as ``-expm1(-x/2)`` so it agrees with the
    exponential closed form exactly.
    """
    if df <= 0:
        raise ValueError("chi2_cdf requires df > 0")
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("chi2_cdf requires x >= 0")
    if df == 2:
        out = -np.expm1(-arr / 2.0)
    else:
        out = special.gammainc(df / 2.0, arr / 2.0)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def chi2_sf(x, df):
    """Chi-squared survival function 1 - chi2_cdf, accurate in the far tail."""
    if df <= 0:
        raise ValueError("chi2_sf requires df > 0")
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("chi2_sf requires x >= 0")
    if df == 2:
        out = np.exp(-arr / 2.0)
    else:
        out = special.gammaincc(df / 2.0, arr / 2.0)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def student_t_cdf(x, df):
    """Student-t CDF with df > 0 degrees of freedom."""
    if df <= 0:
        raise ValueError("student_t_cdf requires df > 0")
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("student_t_cdf requires finite input")
    out = special.stdtr(df, arr)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def student_t_quantile(p, df):
    """Inverse of :func:`student_t_cdf` for p in (0, 1)."""
    if df <= 0:
        raise ValueError("student_t_quantile requires df > 0")
    arr = np.asarray(p, dtype=float)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ValueError("student_t_quantile requires 0 < p < 1")
    out = special.stdtrit(df, arr)
    return float(out) if np.isscalar(p) or arr.ndim == 0 else out


def irwin_hall_cdf(s, k):
    """CDF of the sum of k independent uniform(0,1) random variables.

    For k < 12 the exact piecewise-polynomial alternating sum is used.
    Values above k/2 are computed through the symmetry
    ``F(s) = 1 - F(k - s)`` so the alternating sum is only ever evaluated
    on the numerically benign half of the support.  For k >= 12 the
    central-limit approximation ``Phi(sqrt(12 k) (s/k - 1/2))`` replaces
    the exact formula, which would overflow in k! and the binomials.

    Values outside [0, k] clamp to 0 or 1.
    """
    if k < 1 or int(k) != k:
        raise ValueError("irwin_hall_cdf requires integer k >= 1")
    k = int(k)
    arr = np.asarray(s, dtype=float)
    scalar = np.isscalar(s) or arr.ndim == 0
    arr = np.atleast_1d(arr)

    if k >= 12:
        out = special.ndtr(math.sqrt(12.0 * k) * (arr / k - 0.5))
    else:
        clipped = np.clip(arr, 0.0, float(k))
        flip = clipped > k / 2.0
        half = np.where(flip, k - clipped, clipped)
        total = np.zeros_like(half)
        # floor(half) <= k//2, so at most k//2 + 1 terms survive
        for j in range(int(k // 2) + 1):
            total += (-1.0) ** j * math.comb(k, j) * np.maximum(half - j, 0.0) ** k
        total /= math.factorial(k)
        out = np.where(flip, 1.0 - total, total)
        out = np.where(arr <= 0.0, 0.0, np.where(arr >= k, 1.0, out))

    return float(out[0]) if scalar else out


def nc_hypergeom_support(n1, n0, t):
    """Support of the conditional noncentral hypergeometric distribution."""
    if n1 < 0 or n0 < 0 or t < 0 or t > n1 + n0:
        raise ValueError(f"infeasible margins n1={n1}, n0={n0}, t={t}")
    return np.arange(max(0, t - n0), min(t, n1) + 1)


def _nc_hypergeom_dist(n1, n0, t, log_psi):
    """Full pmf over the support for log odds parameter log_psi.

    Working directly with log(psi) keeps the evaluation stable for odds
    parameters far into either tail; normalization subtracts the maximum
    log term before exponentiating.
    """
    x = nc_hypergeom_support(n1, n0, t)
    logw = (
        special.gammaln(n1 + 1)
        - special.gammaln(x + 1)
        - special.gammaln(n1 - x + 1)
        + special.gammaln(n0 + 1)
        - special.gammaln(t - x + 1)
        - special.gammaln(n0 - t + x + 1)
        + x * log_psi
    )
    logw -= logw.max()
    w = np.exp(logw)
    return x, w / w.sum()


def nc_hypergeom_pmf(x, n1, n0, t, psi):
    """Pmf of the conditional noncentral hypergeometric distribution.

    The distribution of the upper-left cell of a 2x2 table with both
    margins fixed (row totals n1, n0; first column total t) and odds
    parameter psi > 0.  psi = 1 recovers the central hypergeometric.
    """
    if psi <= 0:
        raise ValueError("nc_hypergeom_pmf requires psi > 0")
    support, pmf = _nc_hypergeom_dist(n1, n0, t, math.log(psi))
    if x < support[0] or x > support[-1] or int(x) != x:
        raise ValueError(f"x={x} outside support [{support[0]}, {support[-1]}]")
    return float(pmf[int(x) - int(support[0])])


@dataclass(frozen=True)
class SkewNormal:
    """Skew-normal distribution with location xi, scale omega, shape alpha.

    alpha = 0 reduces to a normal(xi, omega^2) distribution.  The CDF is
    computed by adaptive quadrature of the density (absolute tolerance
    1e-10) rather than via Owen's T function, so a single quadrature
    routine serves both the CDF and median computations.
    """

    xi: float
    omega: float
    alpha: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("SkewNormal requires omega > 0")

    @property
    def delta(self):
        return self.alpha / math.sqrt(1.0 + self.alpha**2)

    def pdf(self, x):
        z = (np.asarray(x, dtype=float) - self.xi) / self.omega
        out = (
            2.0
            / self.omega
            * np.exp(-0.5 * z * z)
            / math.sqrt(2.0 * math.pi)
            * special.ndtr(self.alpha * z)
        )
        return float(out) if np.isscalar(x) or out.ndim == 0 else out

    def _lower_bound(self):
        # density below xi - 14*omega is < 2*phi(14), i.e. negligible
        return self.xi - 14.0 * self.omega

    def cdf(self, x):
        x = float(x)
        lo = self._lower_bound()
        if x <= lo:
            return 0.0
        if x >= self.xi + 14.0 * self.omega:
            return 1.0
        value, _ = integrate.quad(self.pdf, lo, x, epsabs=1e-10, limit=200)
        return min(max(value, 0.0), 1.0)

    def quantile(self, p):
        if not 0.0 < p < 1.0:
            raise ValueError("quantile requires 0 < p < 1")
        lo = self._lower_bound()
        hi = self.xi + 14.0 * self.omega
        # bisection on a smooth monotone CDF; 60 halvings of a 28*omega
        # bracket leave an interval far below any tolerance we report
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if self.cdf(mid) < p:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-12 * max(1.0, abs(mid)) + 1e-14:
                break
        return 0.5 * (lo + hi)

    def sample(self, size, rng):
        """Draw samples via delta*|Z0| + sqrt(1-delta^2)*Z1."""
        z0 = rng.standard_normal(size)
        z1 = rng.standard_normal(size)
        d = self.delta
        return self.xi + self.omega * (d * np.abs(z0) + math.sqrt(1.0 - d * d) * z1)
