"""Meta-analysis with combined p-value functions.

Build a monotone p-value function of the pooled effect from study-level
one-sided p-values (five combination rules: edgington, fisher, pearson,
tippett, wilkinson), then read off a median estimate, confidence
intervals at any level, two-sided p-values, the area under the
confidence curve, and skewness diagnostics.  Classical fixed effect,
DerSimonian-Laird random effects, and Hartung-Knapp comparators and a
reproducible Monte Carlo harness are included.
"""

from .classic import ClassicResult, dl_random_effects, fixed_effect, hartung_knapp
from .combine import METHODS, PValueFunction, combine_p, make_pfunction
from .data import CORTICOSTEROID_TRIALS, corticosteroid_studies, corticosteroid_tables
from .effects import (
    ORIENTATIONS,
    Study,
    log_or_from_counts,
    one_sided_p,
    study_from_counts,
    z_statistic,
)
from .exact import Table2x2, exact_midp, make_exact_pfunction
from .heterogeneity import (
    HeterogeneityEstimate,
    cochran_q,
    estimate_heterogeneity,
    higgins_i2,
    phi_multiplicative,
    tau2_dl,
    tau2_reml,
)
from .infer import (
    MetaResult,
    NonConvergenceError,
    analyze,
    aucc,
    aucc_ratio,
    aucc_support,
    centrality,
    closed_form_tippett,
    closed_form_wilkinson,
    confidence_density,
    confidence_interval,
    median_estimate,
)
from .metrics import (
    KappaResult,
    beta_skewness,
    cohen_kappa,
    gamma_weighted_skewness,
    pearson_correlation,
    sign_category,
)
from .simulate import (
    ALL_METHODS,
    CLASSIC_METHODS,
    MethodPerformance,
    SimScenario,
    SimSummary,
    estimands,
    generate_dataset,
    run_scenario,
    skew_normal_params,
    tau2_from_i2,
)
from .special import (
    SkewNormal,
    chi2_cdf,
    chi2_sf,
    irwin_hall_cdf,
    nc_hypergeom_pmf,
    nc_hypergeom_support,
    std_normal_cdf,
    std_normal_quantile,
    student_t_cdf,
    student_t_quantile,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_METHODS",
    "CLASSIC_METHODS",
    "CORTICOSTEROID_TRIALS",
    "ClassicResult",
    "HeterogeneityEstimate",
    "KappaResult",
    "METHODS",
    "MetaResult",
    "MethodPerformance",
    "NonConvergenceError",
    "ORIENTATIONS",
    "PValueFunction",
    "SimScenario",
    "SimSummary",
    "SkewNormal",
    "Study",
    "Table2x2",
    "analyze",
    "aucc",
    "aucc_ratio",
    "aucc_support",
    "beta_skewness",
    "centrality",
    "chi2_cdf",
    "chi2_sf",
    "closed_form_tippett",
    "closed_form_wilkinson",
    "cochran_q",
    "cohen_kappa",
    "combine_p",
    "confidence_density",
    "confidence_interval",
    "corticosteroid_studies",
    "corticosteroid_tables",
    "dl_random_effects",
    "estimands",
    "estimate_heterogeneity",
    "exact_midp",
    "fixed_effect",
    "gamma_weighted_skewness",
    "generate_dataset",
    "hartung_knapp",
    "higgins_i2",
    "irwin_hall_cdf",
    "log_or_from_counts",
    "make_exact_pfunction",
    "make_pfunction",
    "median_estimate",
    "nc_hypergeom_pmf",
    "nc_hypergeom_support",
    "one_sided_p",
    "pearson_correlation",
    "phi_multiplicative",
    "run_scenario",
    "sign_category",
    "skew_normal_params",
    "std_normal_cdf",
    "std_normal_quantile",
    "student_t_cdf",
    "student_t_quantile",
    "study_from_counts",
    "tau2_dl",
    "tau2_from_i2",
    "tau2_reml",
    "z_statistic",
]
