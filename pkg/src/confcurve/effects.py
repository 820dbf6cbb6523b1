"""Study-level inputs: effect estimates, z-statistics, one-sided p-values."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special import std_normal_cdf

__all__ = [
    "ORIENTATIONS",
    "Study",
    "log_or_from_counts",
    "study_from_counts",
    "effective_se",
    "z_statistic",
    "one_sided_p",
]

ORIENTATIONS = ("greater", "less")


def _check_orientation(orientation):
    if orientation not in ORIENTATIONS:
        raise ValueError(f"orientation must be one of {ORIENTATIONS}, got {orientation!r}")


@dataclass(frozen=True)
class Study:
    """One study's effect estimate and standard error.

    ``estimate`` is on whatever scale the caller declares (log odds ratio,
    standardized mean difference, ...); the engine never guesses.  The
    optional ``counts`` tuple (events_treat, n_treat, events_ctrl, n_ctrl)
    carries the underlying 2x2 data when available, enabling the exact
    small-count path.
    """

    id: str
    estimate: float
    se: float
    counts: tuple[int, int, int, int] | None = None

    def __post_init__(self):
        if not (math.isfinite(self.estimate) and math.isfinite(self.se)):
            raise ValueError(f"study {self.id!r}: estimate and se must be finite")
        if self.se <= 0:
            raise ValueError(f"study {self.id!r}: se must be positive")
        if self.counts is not None:
            et, nt, ec, nc = self.counts
            if min(et, nt, ec, nc) < 0 or et > nt or ec > nc:
                raise ValueError(f"study {self.id!r}: invalid 2x2 counts {self.counts}")


def log_or_from_counts(events_treat, n_treat, events_ctrl, n_ctrl):
    """Log odds ratio and its standard error from 2x2 counts.

    Returns ``(estimate, se)`` with
    ``estimate = ln(a*d / (b*c))`` and ``se = sqrt(1/a + 1/b + 1/c + 1/d)``
    for cells a = events_treat, b = n_treat - events_treat,
    c = events_ctrl, d = n_ctrl - events_ctrl.

    Zero cells are a hard error: there is deliberately no silent 0.5
    continuity correction.  Small-count tables should go through the
    exact conditional path (:mod:`confcurve.exact`) instead.
    """
    a, b = events_treat, n_treat - events_treat
    c, d = events_ctrl, n_ctrl - events_ctrl
    if min(a, b, c, d) <= 0:
        raise ValueError(
            "zero cell in 2x2 table: use the exact method (make_exact_pfunction / "
            "--exact) or apply an explicit continuity policy before ingestion"
        )
    estimate = math.log(a * d / (b * c))
    se = math.sqrt(1.0 / a + 1.0 / b + 1.0 / c + 1.0 / d)
    return estimate, se


def study_from_counts(study_id, events_treat, n_treat, events_ctrl, n_ctrl):
    """Build a :class:`Study` on the log odds ratio scale from 2x2 counts."""
    estimate, se = log_or_from_counts(events_treat, n_treat, events_ctrl, n_ctrl)
    return Study(
        id=str(study_id),
        estimate=estimate,
        se=se,
        counts=(events_treat, n_treat, events_ctrl, n_ctrl),
    )


def effective_se(se, tau2=0.0, phi=1.0):
    """Heterogeneity-adjusted standard error sqrt(phi * se^2 + tau2)."""
    if tau2 < 0:
        raise ValueError("tau2 must be nonnegative")
    if phi < 1:
        raise ValueError("phi must be >= 1")
    if tau2 > 0 and phi > 1:
        raise ValueError("at most one of tau2 > 0 and phi > 1 may be active")
    return np.sqrt(phi * np.asarray(se, dtype=float) ** 2 + tau2)


def z_statistic(study, mu, tau2=0.0, phi=1.0):
    """z-statistic for the null that the study's true effect equals mu.

    With tau2 = 0 and phi = 1 this is the plain (estimate - mu) / se;
    tau2 > 0 applies the additive heterogeneity adjustment and phi > 1
    the multiplicative one.  The two adjustments are mutually exclusive.
    """
    return (study.estimate - mu) / float(effective_se(study.se, tau2, phi))


def one_sided_p(z, orientation):
    """One-sided normal p-value for the given alternative.

    ``greater`` maps z to 1 - Phi(z), ``less`` to Phi(z); the two always
    sum to one.
    """
    _check_orientation(orientation)
    p_less = std_normal_cdf(z)
    return 1.0 - p_less if orientation == "greater" else p_less
