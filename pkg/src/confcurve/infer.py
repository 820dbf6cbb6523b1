"""Point and interval estimation from a combined p-value function.

The median estimate is the mu where the one-sided function crosses 1/2;
confidence limits are the crossings of alpha/2 and 1 - alpha/2, or
equivalently the two level-alpha crossings of the centrality function
2 min{p(mu), 1 - p(mu)}.  The area under that curve (AUCC) summarizes
precision independently of any confidence level; the signed split of the
area around the estimate summarizes curve skewness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .combine import PValueFunction
from .metrics import beta_skewness
from .special import std_normal_quantile

__all__ = [
    "NonConvergenceError",
    "MetaResult",
    "median_estimate",
    "confidence_interval",
    "closed_form_wilkinson",
    "closed_form_tippett",
    "centrality",
    "aucc_support",
    "aucc",
    "aucc_ratio",
    "confidence_density",
    "analyze",
]

_MU_TOL = 1e-9
_F_TOL = 1e-10
_MAX_DOUBLINGS = 60
_AUCC_EPS = 1e-6
_AUCC_POINTS = 4001


class NonConvergenceError(RuntimeError):
    """Raised when bracket expansion or root refinement fails.

    Callers that aggregate over many analyses are expected to catch this
    and record the analysis as non-convergent rather than substituting a
    fallback value.
    """


@dataclass(frozen=True)
class MetaResult:
    """Full inference summary for one method; fields are None when the
    corresponding computation failed to converge."""

    estimate: float | None
    lower: float | None
    upper: float | None
    level: float
    p_null: float | None
    width: float | None
    aucc: float | None
    aucc_ratio: float | None
    beta_skew: float | None
    converged: bool


def _find_root(f, target, lo, hi):
    """Root of f(mu) = target for monotone f, via bracket expansion then a
    bisection/secant hybrid.

    The bracket doubles outward up to 60 times until it straddles the
    target.  Refinement keeps a sign-changing bracket, combining secant
    proposals with an Illinois-style weight halving (falling back to
    bisection for proposals outside the bracket) until the bracket is
    narrower than 1e-9 in mu; a short secant polish then pushes the
    residual itself below 1e-10.
    """
    glo = f(lo) - target
    ghi = f(hi) - target
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    doublings = 0
    while glo * ghi > 0.0:
        if doublings >= _MAX_DOUBLINGS:
            raise NonConvergenceError(
                f"no sign change for target {target} after {_MAX_DOUBLINGS} bracket doublings"
            )
        width = hi - lo
        lo -= width
        hi += width
        glo = f(lo) - target
        ghi = f(hi) - target
        doublings += 1

    # phase 1: shrink the bracket to _MU_TOL.  wlo/whi are Illinois
    # weights, down-scaled when an endpoint is retained twice in a row so
    # the secant cannot stagnate against one end.
    best, gbest = (lo, glo) if abs(glo) <= abs(ghi) else (hi, ghi)
    wlo, whi = glo, ghi
    side = 0
    for _ in range(300):
        if hi - lo < _MU_TOL:
            break
        x = (lo * whi - hi * wlo) / (whi - wlo) if whi != wlo else 0.5 * (lo + hi)
        if not lo < x < hi:
            x = 0.5 * (lo + hi)
        gx = f(x) - target
        if abs(gx) < abs(gbest):
            best, gbest = x, gx
        if gx == 0.0:
            return x
        if glo * gx < 0.0:
            hi, ghi, whi = x, gx, gx
            if side == -1:
                wlo *= 0.5
            side = -1
        else:
            lo, glo, wlo = x, gx, gx
            if side == 1:
                whi *= 0.5
            side = 1
    else:
        raise NonConvergenceError(f"root refinement for target {target} did not converge")

    # phase 2: the function is locally linear at this scale, so a few
    # plain secant steps reach the residual tolerance
    x0, g0 = lo, glo
    x1, g1 = hi, ghi
    if abs(gbest) < min(abs(g0), abs(g1)):
        x1, g1 = best, gbest
    for _ in range(30):
        if abs(g1) <= _F_TOL:
            return x1
        if g1 == g0:
            break
        x2 = x1 - g1 * (x1 - x0) / (g1 - g0)
        g2 = f(x2) - target
        x0, g0, x1, g1 = x1, g1, x2, g2
    if abs(g1) <= _F_TOL:
        return x1
    if abs(gbest) <= _F_TOL:
        return best
    raise NonConvergenceError(
        f"residual {min(abs(g1), abs(gbest)):.3e} above tolerance for target {target}"
    )


def median_estimate(f: PValueFunction):
    """The mu where the combined one-sided p-value equals 1/2."""
    lo, hi = f.initial_bracket()
    return _find_root(f, 0.5, lo, hi)


def confidence_interval(f: PValueFunction, level=0.95):
    """Equal-tailed confidence interval from the p-value function.

    For orientation "greater" the limits solve f(lower) = alpha/2 and
    f(upper) = 1 - alpha/2 with alpha = 1 - level; orientation "less"
    swaps the two targets.  Both are the level-alpha crossings of the
    centrality function.
    """
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    alpha = 1.0 - level
    lo, hi = f.initial_bracket()
    if f.orientation == "greater":
        lower = _find_root(f, alpha / 2.0, lo, hi)
        upper = _find_root(f, 1.0 - alpha / 2.0, lo, hi)
    else:
        lower = _find_root(f, 1.0 - alpha / 2.0, lo, hi)
        upper = _find_root(f, alpha / 2.0, lo, hi)
    return lower, upper


def _study_arrays(studies):
    est = np.array([s.estimate for s in studies], dtype=float)
    se = np.array([s.se for s in studies], dtype=float)
    return est, se


def closed_form_wilkinson(studies, alpha, orientation):
    """Closed-form solution for the max-p rule under normal p-values.

    Solving (max_i p_i(mu))^k = alpha gives
    min_i{estimate_i + se_i * z_{alpha^(1/k)}} for alternative "greater"
    and max_i{estimate_i - se_i * z_{alpha^(1/k)}} for "less".  alpha=0.5
    yields the median estimate; alpha/2 and 1-alpha/2 the interval limits.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    est, se = _study_arrays(studies)
    z = std_normal_quantile(alpha ** (1.0 / est.size))
    if orientation == "greater":
        return float(np.min(est + se * z))
    if orientation == "less":
        return float(np.max(est - se * z))
    raise ValueError(f"unknown orientation {orientation!r}")


def closed_form_tippett(studies, alpha, orientation):
    """Closed-form solution for the min-p rule under normal p-values.

    Solving 1 - (1 - min_i p_i(mu))^k = alpha gives
    max_i{estimate_i - se_i * z_{(1-alpha)^(1/k)}} for "greater" and
    min_i{estimate_i + se_i * z_{(1-alpha)^(1/k)}} for "less".
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    est, se = _study_arrays(studies)
    z = std_normal_quantile((1.0 - alpha) ** (1.0 / est.size))
    if orientation == "greater":
        return float(np.max(est - se * z))
    if orientation == "less":
        return float(np.min(est + se * z))
    raise ValueError(f"unknown orientation {orientation!r}")


def centrality(f: PValueFunction, mu):
    """Confidence curve 2 min{p(mu), 1 - p(mu)}; maximized at the estimate."""
    p = f(mu)
    return 2.0 * np.minimum(p, 1.0 - p)


def aucc_support(f: PValueFunction, eps=_AUCC_EPS):
    """Interval outside which the centrality has decayed below eps.

    Expands geometrically from the initial bracket; failure to decay
    within 60 doublings on either side raises NonConvergenceError.
    """
    lo, hi = f.initial_bracket()
    step = hi - lo
    for _ in range(_MAX_DOUBLINGS):
        if centrality(f, lo) < eps:
            break
        lo -= step
        step *= 2.0
    else:
        raise NonConvergenceError("centrality does not decay on the left")
    step = hi - lo
    for _ in range(_MAX_DOUBLINGS):
        if centrality(f, hi) < eps:
            break
        hi += step
        step *= 2.0
    else:
        raise NonConvergenceError("centrality does not decay on the right")
    return lo, hi


def aucc(f: PValueFunction):
    """Area under the confidence curve by trapezoid on a uniform grid."""
    lo, hi = aucc_support(f)
    grid = np.linspace(lo, hi, _AUCC_POINTS)
    return float(np.trapezoid(centrality(f, grid), grid))


def _aucc_split(f, estimate):
    lo, hi = aucc_support(f)
    half = _AUCC_POINTS // 2 + 1
    below_grid = np.linspace(lo, estimate, half)
    above_grid = np.linspace(estimate, hi, half)
    below = float(np.trapezoid(centrality(f, below_grid), below_grid))
    above = float(np.trapezoid(centrality(f, above_grid), above_grid))
    return below, above


def aucc_ratio(f: PValueFunction, estimate):
    """(area above - area below the estimate) / total area, in [-1, 1]."""
    below, above = _aucc_split(f, estimate)
    return (above - below) / (above + below)


def confidence_density(f: PValueFunction, grid=None):
    """Confidence density of an increasing p-value function.

    Differentiates f by central differences with step (hi - lo)/2000.
    ``grid`` is an optional (lo, hi, points) range spec; by default the
    density is evaluated on 2001 points spanning the AUCC support.
    Returns (mu, density) arrays; tiny negative finite-difference noise
    is clamped to zero.
    """
    if f.orientation != "greater":
        raise ValueError("confidence_density requires a greater-oriented (increasing) function")
    if grid is None:
        lo, hi = aucc_support(f)
        points = 2001
    else:
        lo, hi, points = grid
        if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi and points >= 2):
            raise ValueError(f"invalid grid spec {grid!r}")
        points = int(points)
    mu = np.linspace(lo, hi, points)
    h = (hi - lo) / 2000.0
    dens = (f(mu + h) - f(mu - h)) / (2.0 * h)
    return mu, np.maximum(dens, 0.0)


def analyze(f: PValueFunction, level=0.95):
    """Median estimate, CI, two-sided p at 0, AUCC, and skewness diagnostics.

    Non-convergence of any component is never papered over: the affected
    fields are left as None and the result is flagged converged=False.
    """
    estimate = lower = upper = width = area = ratio = beta = None
    converged = True
    try:
        estimate = median_estimate(f)
    except NonConvergenceError:
        converged = False
    try:
        lower, upper = confidence_interval(f, level)
        width = upper - lower
    except NonConvergenceError:
        converged = False
    p_null = float(centrality(f, 0.0))
    if estimate is not None:
        try:
            below, above = _aucc_split(f, estimate)
            area = below + above
            ratio = (above - below) / area
        except NonConvergenceError:
            converged = False
    if estimate is not None and lower is not None and lower < upper:
        beta = beta_skewness(estimate, lower, upper)
    return MetaResult(
        estimate=estimate,
        lower=lower,
        upper=upper,
        level=level,
        p_null=p_null,
        width=width,
        aucc=area,
        aucc_ratio=ratio,
        beta_skew=beta,
        converged=converged,
    )
