"""Monte Carlo evaluation of the estimation methods on a factorial grid.

One repetition draws true study effects (normal or skew normal around a
common mean), observed effect estimates, and noisy squared standard
errors, then runs every requested method on the synthetic meta-analysis.
Aggregates per scenario cell: coverage, bias, and interval width with
Monte Carlo standard errors, AUCC, the distribution of the interval
skewness, and sign-agreement/correlation between interval skewness and
data skewness.

Random streams are counter-based: each (scenario, repetition) pair seeds
its own Philox generator from the scenario's fields, so results are
identical no matter how repetitions are scheduled or how many workers
run them.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .classic import dl_random_effects, fixed_effect, hartung_knapp
from .combine import METHODS, make_pfunction
from .effects import Study
from .heterogeneity import tau2_reml
from .infer import NonConvergenceError, analyze
from .metrics import cohen_kappa, gamma_weighted_skewness, pearson_correlation, sign_category
from .special import SkewNormal

__all__ = [
    "CLASSIC_METHODS",
    "ALL_METHODS",
    "SimScenario",
    "MethodPerformance",
    "SimSummary",
    "tau2_from_i2",
    "skew_normal_params",
    "generate_dataset",
    "estimands",
    "run_scenario",
]

CLASSIC_METHODS = ("fixed", "dl", "hk")
ALL_METHODS = CLASSIC_METHODS + METHODS

_N_SMALL = 50
_N_LARGE = 500
ADJUSTMENTS = ("none", "additive_reml")


@dataclass(frozen=True)
class SimScenario:
    """One cell of the factorial design.

    ``alpha`` is the shape of the skew-normal study effect distribution
    (0 means plain normal); ``adjust`` selects whether the p-value
    combination methods plug in the REML heterogeneity estimate.
    """

    k: int
    n_large: int
    i2: float
    n_sim: int
    theta: float = 0.2
    alpha: float = 0.0
    base_seed: int = 0
    adjust: str = "none"

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("scenario requires k >= 2 studies")
        if not 0 <= self.n_large <= self.k:
            raise ValueError("n_large must lie in [0, k]")
        if not 0.0 <= self.i2 < 1.0:
            raise ValueError("i2 must lie in [0, 1)")
        if self.n_sim < 1:
            raise ValueError("n_sim must be positive")
        if self.adjust not in ADJUSTMENTS:
            raise ValueError(f"adjust must be one of {ADJUSTMENTS}")

    def sample_sizes(self):
        """Per-group sample sizes; the first n_large studies are large."""
        n = np.full(self.k, _N_SMALL)
        n[: self.n_large] = _N_LARGE
        return n


def tau2_from_i2(k, n_list, i2):
    """Between-study variance implied by a target relative heterogeneity.

    The typical within-study variance is eps^2 = mean(2 / n_i); solving
    i2 = tau2 / (eps^2 + tau2) gives tau2 = eps^2 * i2 / (1 - i2).
    """
    if not 0.0 <= i2 < 1.0:
        raise ValueError("i2 must lie in [0, 1)")
    n = np.asarray(n_list, dtype=float)
    if n.size != k:
        raise ValueError("n_list must have k entries")
    eps2 = float(np.mean(2.0 / n))
    return eps2 * i2 / (1.0 - i2)


def skew_normal_params(theta, tau, alpha):
    """Skew-normal location and scale giving mean theta and variance tau^2.

    With delta = alpha / sqrt(1 + alpha^2):
    omega = tau / sqrt(1 - 2 delta^2 / pi), xi = theta - omega delta sqrt(2/pi).
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    delta = alpha / math.sqrt(1.0 + alpha**2)
    omega = tau / math.sqrt(1.0 - 2.0 * delta**2 / math.pi)
    xi = theta - omega * delta * math.sqrt(2.0 / math.pi)
    return xi, omega


def _entropy_int(x):
    # fold floats to a stable nonnegative integer key (1e-6 resolution)
    return int(np.uint64(np.int64(round(float(x) * 1_000_000))))


def _rng_for(scenario, rep_index):
    """Philox generator for one (scenario, repetition) substream."""
    key = [
        int(np.uint64(np.int64(scenario.base_seed))),
        scenario.k,
        scenario.n_large,
        _entropy_int(scenario.i2),
        _entropy_int(scenario.theta),
        _entropy_int(scenario.alpha),
        ADJUSTMENTS.index(scenario.adjust),
        int(rep_index),
    ]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def generate_dataset(scenario, rep_index):
    """Draw one synthetic meta-analysis as a list of Study objects.

    True effects come from N(theta, tau2) (or its skew-normal analogue
    for alpha != 0), estimates from N(effect, 2/n), and squared standard
    errors from chi^2_{2(n-1)} / ((n-1) n).  Deterministic in
    (base_seed, scenario fields, rep_index).
    """
    rng = _rng_for(scenario, rep_index)
    n = scenario.sample_sizes()
    tau2 = tau2_from_i2(scenario.k, n, scenario.i2)
    if tau2 == 0.0:
        effects = np.full(scenario.k, scenario.theta)
    elif scenario.alpha == 0.0:
        effects = rng.normal(scenario.theta, math.sqrt(tau2), scenario.k)
    else:
        xi, omega = skew_normal_params(scenario.theta, math.sqrt(tau2), scenario.alpha)
        effects = SkewNormal(xi, omega, scenario.alpha).sample(scenario.k, rng)
    estimates = rng.normal(effects, np.sqrt(2.0 / n))
    se2 = rng.chisquare(2 * (n - 1)) / ((n - 1) * n)
    return [
        Study(id=f"study_{i + 1}", estimate=float(estimates[i]), se=float(math.sqrt(se2[i])))
        for i in range(scenario.k)
    ]


def estimands(scenario):
    """(mean, median) of the true study effect distribution."""
    mean = scenario.theta
    n = scenario.sample_sizes()
    tau2 = tau2_from_i2(scenario.k, n, scenario.i2)
    if scenario.alpha == 0.0 or tau2 == 0.0:
        return mean, mean
    xi, omega = skew_normal_params(scenario.theta, math.sqrt(tau2), scenario.alpha)
    return mean, SkewNormal(xi, omega, scenario.alpha).quantile(0.5)


@dataclass
class MethodPerformance:
    """Aggregated performance of one method in one scenario cell.

    Coverage and bias are reported against both the mean and the median
    of the true effect distribution (identical unless the scenario uses
    a skewed distribution).  Fields that do not apply to a method (AUCC
    for the classical ones, kappa/correlation when every interval is
    symmetric) are NaN.
    """

    method: str
    n_converged: int
    convergence_rate: float
    coverage_mean: float
    coverage_mean_mcse: float
    coverage_median: float
    coverage_median_mcse: float
    bias_mean: float
    bias_mean_mcse: float
    bias_median: float
    bias_median_mcse: float
    width: float
    width_mcse: float
    aucc: float
    beta_mean: float
    beta_median: float
    beta_min: float
    beta_max: float
    kappa_beta_gamma: float
    kappa_aucc_ratio_gamma: float
    corr_beta_gamma: float


@dataclass
class SimSummary:
    scenario: SimScenario
    estimand_mean: float
    estimand_median: float
    methods: dict[str, MethodPerformance] = field(default_factory=dict)


def _evaluate_rep(scenario, rep_index, methods):
    """Apply every requested method to one synthetic dataset.

    Returns (records, gamma) where records maps method name to the tuple
    (converged, estimate, lower, upper, aucc, aucc_ratio, beta) with
    NaNs marking unavailable values, and gamma is the data skewness with
    weights matching the scenario's adjustment setting.
    """
    studies = generate_dataset(scenario, rep_index)
    est = np.array([s.estimate for s in studies])
    se = np.array([s.se for s in studies])

    needs_reml = scenario.adjust == "additive_reml" or any(
        m in ("dl", "hk") for m in methods
    )
    tau2_hat = tau2_reml(studies).tau2 if needs_reml else 0.0
    combo_tau2 = tau2_hat if scenario.adjust == "additive_reml" else 0.0

    if scenario.adjust == "additive_reml":
        weights = 1.0 / (se**2 + tau2_hat)
    else:
        weights = 1.0 / se**2
    gamma = gamma_weighted_skewness(est, weights)

    records = {}
    for m in methods:
        if m == "fixed":
            r = fixed_effect(studies)
            records[m] = (True, r.estimate, r.lower, r.upper, np.nan, np.nan, 0.0)
        elif m == "dl":
            r = dl_random_effects(studies, tau2_estimator="reml")
            records[m] = (True, r.estimate, r.lower, r.upper, np.nan, np.nan, 0.0)
        elif m == "hk":
            r = hartung_knapp(studies, tau2_estimator="reml")
            records[m] = (True, r.estimate, r.lower, r.upper, np.nan, np.nan, 0.0)
        else:
            f = make_pfunction(studies, m, "greater", tau2=combo_tau2)
            res = analyze(f)
            if res.converged:
                records[m] = (
                    True,
                    res.estimate,
                    res.lower,
                    res.upper,
                    res.aucc,
                    res.aucc_ratio,
                    res.beta_skew,
                )
            else:
                records[m] = (False, np.nan, np.nan, np.nan, np.nan, np.nan, np.nan)
    return records, gamma


def _run_chunk(args):
    scenario, methods, start, stop = args
    n = stop - start
    out = {m: np.empty((n, 7)) for m in methods}
    gammas = np.empty(n)
    for i, rep in enumerate(range(start, stop)):
        records, gamma = _evaluate_rep(scenario, rep, methods)
        gammas[i] = gamma
        for m in methods:
            conv, e, lo, hi, area, ratio, beta = records[m]
            out[m][i] = (float(conv), e, lo, hi, area, ratio, beta)
    return out, gammas


def _nan_or(value):
    return float(value) if value is not None else np.nan


def _summarize_method(m, rows, gammas, estimand_mean, estimand_median, n_sim):
    conv = rows[:, 0] == 1.0
    n_used = int(conv.sum())
    if n_used == 0:
        nan = float("nan")
        return MethodPerformance(
            m, 0, 0.0, *([nan] * 18)
        )
    e = rows[conv, 1]
    lo = rows[conv, 2]
    hi = rows[conv, 3]
    area = rows[conv, 4]
    ratio = rows[conv, 5]
    beta = rows[conv, 6]
    g = gammas[conv]

    cov_mean = float(np.mean((lo <= estimand_mean) & (estimand_mean <= hi)))
    cov_med = float(np.mean((lo <= estimand_median) & (estimand_median <= hi)))
    widths = hi - lo
    bias_mean = e - estimand_mean
    bias_med = e - estimand_median

    def _mcse(x):
        return float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else float("nan")

    sign_g = np.array([sign_category(v) for v in g])
    sign_b = np.array([sign_category(v) for v in beta])
    if np.all(sign_b == 0) or np.all(np.isnan(beta)):
        kappa_bg = float("nan")
        corr_bg = float("nan")
    else:
        kappa_bg = cohen_kappa(sign_b, sign_g).value
        try:
            corr_bg = pearson_correlation(beta, g)
        except ValueError:
            corr_bg = float("nan")
    if np.all(np.isnan(ratio)):
        kappa_rg = float("nan")
    else:
        sign_r = np.array([sign_category(v) for v in ratio])
        kappa_rg = cohen_kappa(sign_r, sign_g).value

    return MethodPerformance(
        method=m,
        n_converged=n_used,
        convergence_rate=n_used / n_sim,
        coverage_mean=cov_mean,
        coverage_mean_mcse=math.sqrt(cov_mean * (1.0 - cov_mean) / n_used),
        coverage_median=cov_med,
        coverage_median_mcse=math.sqrt(cov_med * (1.0 - cov_med) / n_used),
        bias_mean=float(np.mean(bias_mean)),
        bias_mean_mcse=_mcse(bias_mean),
        bias_median=float(np.mean(bias_med)),
        bias_median_mcse=_mcse(bias_med),
        width=float(np.mean(widths)),
        width_mcse=_mcse(widths),
        aucc=float(np.mean(area)) if not np.all(np.isnan(area)) else float("nan"),
        beta_mean=float(np.mean(beta)),
        beta_median=float(np.median(beta)),
        beta_min=float(np.min(beta)),
        beta_max=float(np.max(beta)),
        kappa_beta_gamma=kappa_bg,
        kappa_aucc_ratio_gamma=kappa_rg,
        corr_beta_gamma=corr_bg,
    )


def default_workers():
    env = os.environ.get("CONFCURVE_THREADS")
    if env:
        return max(1, int(env))
    return 1


def run_scenario(scenario, methods=ALL_METHODS, workers=None):
    """Evaluate the requested methods over all repetitions of one cell.

    Repetitions are split into contiguous chunks executed by a process
    pool when workers > 1; every repetition owns an independent substream
    and chunk results are reassembled in repetition order, so the output
    is identical for any worker count.
    """
    methods = tuple(methods)
    unknown = [m for m in methods if m not in ALL_METHODS]
    if unknown:
        raise ValueError(f"unknown methods {unknown}; choose from {ALL_METHODS}")
    if workers is None:
        workers = default_workers()

    n = scenario.n_sim
    if workers <= 1 or n < 4:
        chunks = [_run_chunk((scenario, methods, 0, n))]
    else:
        bounds = np.linspace(0, n, min(workers * 4, n) + 1).astype(int)
        tasks = [
            (scenario, methods, int(a), int(b))
            for a, b in zip(bounds[:-1], bounds[1:])
            if b > a
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_chunk, tasks))

    rows = {m: np.concatenate([c[0][m] for c in chunks]) for m in methods}
    gammas = np.concatenate([c[1] for c in chunks])

    est_mean, est_median = estimands(scenario)
    summary = SimSummary(scenario=scenario, estimand_mean=est_mean, estimand_median=est_median)
    for m in methods:
        summary.methods[m] = _summarize_method(
            m, rows[m], gammas, est_mean, est_median, n
        )
    return summary
