"""Command-line interface.

Subcommands: ``analyze`` (method comparison table), ``drapery``
(centrality curve grid for studies and methods), ``density`` (confidence
density grid), ``simulate`` (factorial Monte Carlo summary).  Input is a
CSV of studies with columns (id, estimate, se) or
(id, e_t, n_t, e_c, n_c); simulate instead takes a JSON scenario spec.

Exit codes: 0 success, 2 input error, 3 partial non-convergence
(analyze only; rows are still emitted, flagged), 1 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
import traceback

import numpy as np

from .classic import dl_random_effects, fixed_effect, hartung_knapp
from .combine import METHODS, make_pfunction
from .data import CORTICOSTEROID_TRIALS  # noqa: F401  (handy for --help examples)
from .effects import Study, study_from_counts
from .exact import Table2x2, make_exact_pfunction
from .heterogeneity import estimate_heterogeneity
from .infer import aucc_support, analyze, centrality, confidence_density
from .simulate import (
    ALL_METHODS,
    SimScenario,
    default_workers,
    run_scenario,
)
from .special import std_normal_cdf

CLASSIC = ("fixed", "dl", "hk")
METHOD_ORDER = METHODS + CLASSIC


class InputError(Exception):
    """User-facing input problem; maps to exit code 2."""


def _parse_methods(spec):
    if spec == "all":
        return list(METHOD_ORDER)
    names = [m.strip() for m in spec.split(",") if m.strip()]
    if not names:
        raise InputError("--method list is empty")
    for m in names:
        if m not in METHOD_ORDER:
            raise InputError(f"unknown method {m!r}; choose from {', '.join(METHOD_ORDER)} or 'all'")
    return names


def _parse_grid(spec):
    parts = spec.split(":")
    if len(parts) != 3:
        raise InputError(f"--grid must be LO:HI:N, got {spec!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise InputError(f"--grid must be LO:HI:N with numeric parts: {exc}") from exc
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise InputError("--grid requires finite LO < HI")
    if n < 2:
        raise InputError("--grid requires at least 2 points")
    return lo, hi, n


def _read_csv(path):
    """Parse a study CSV; returns (studies, tables or None)."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file (header row required)") from None
        cols = [c.strip() for c in header]
        idx = {c: i for i, c in enumerate(cols)}
        counts_schema = {"id", "e_t", "n_t", "e_c", "n_c"}.issubset(idx)
        plain_schema = {"id", "estimate", "se"}.issubset(idx)
        if not counts_schema and not plain_schema:
            raise InputError(
                f"{path}: line 1: header must contain (id, estimate, se) or "
                f"(id, e_t, n_t, e_c, n_c); got {cols}"
            )

        studies = []
        tables = [] if counts_schema else None
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < len(cols):
                raise InputError(f"{path}: line {lineno}: expected {len(cols)} fields, got {len(row)}")
            sid = row[idx["id"]].strip()
            try:
                if counts_schema:
                    e_t, n_t = int(row[idx["e_t"]]), int(row[idx["n_t"]])
                    e_c, n_c = int(row[idx["e_c"]]), int(row[idx["n_c"]])
                    tables.append(Table2x2.from_counts(e_t, n_t, e_c, n_c))
                    studies.append((sid, e_t, n_t, e_c, n_c))
                else:
                    estimate = float(row[idx["estimate"]])
                    se = float(row[idx["se"]])
                    studies.append(Study(id=sid, estimate=estimate, se=se))
            except ValueError as exc:
                raise InputError(f"{path}: line {lineno}: {exc}") from exc
        if not studies:
            raise InputError(f"{path}: no study rows found")
    return studies, tables


def _materialize_studies(raw, path):
    """Turn deferred count rows into Study objects (zero cells error here)."""
    out = []
    for item in raw:
        if isinstance(item, Study):
            out.append(item)
        else:
            sid, e_t, n_t, e_c, n_c = item
            try:
                out.append(study_from_counts(sid, e_t, n_t, e_c, n_c))
            except ValueError as exc:
                raise InputError(f"{path}: study {sid!r}: {exc}") from exc
    return out


def _heterogeneity_for(args, studies):
    """(tau2, phi) to plug into the combination methods."""
    if args.het == "none":
        return 0.0, 1.0
    if len(studies) < 2:
        raise InputError(f"--het {args.het} requires at least two studies")
    h = estimate_heterogeneity(studies, args.tau2)
    if args.het == "additive":
        return h.tau2, 1.0
    return 0.0, h.phi


def _fmt_cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return repr(value)
    return str(value)


def _json_cell(value):
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def _write_rows(rows, columns, args):
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt_cell(row[c]) for c in columns])
        text = buf.getvalue()
    else:
        text = json.dumps(
            [{c: _json_cell(row[c]) for c in columns} for row in rows], indent=2
        )
        text += "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


ANALYZE_COLUMNS = [
    "method", "estimate", "lower", "upper", "p_value", "ci_width",
    "aucc", "ci_skewness", "aucc_ratio", "converged", "tau2", "phi",
]


def _classic_row(method, studies, args):
    if method == "fixed":
        r = fixed_effect(studies, args.level)
    elif method == "dl":
        r = dl_random_effects(studies, args.level, args.tau2)
    else:
        r = hartung_knapp(studies, args.level, args.tau2)
    return {
        "method": method,
        "estimate": r.estimate,
        "lower": r.lower,
        "upper": r.upper,
        "p_value": r.p_null,
        "ci_width": r.upper - r.lower,
        "aucc": None,
        "ci_skewness": 0.0,
        "aucc_ratio": None,
        "converged": True,
        "tau2": r.tau2_used,
        "phi": 1.0,
    }


def _build_pfunction(method, args, studies, tables, tau2, phi):
    if args.exact:
        return make_exact_pfunction(tables, method, args.alternative)
    return make_pfunction(studies, method, args.alternative, tau2=tau2, phi=phi)


def _cmd_analyze(args):
    raw, tables = _read_csv(args.input)
    methods = _parse_methods(args.method)
    if args.exact and tables is None:
        raise InputError("--exact requires the counts schema (id, e_t, n_t, e_c, n_c)")
    if args.exact and args.het != "none":
        raise InputError("the exact path does not support heterogeneity adjustment")

    combo = [m for m in methods if m in METHODS]
    classic = [m for m in methods if m in CLASSIC]

    studies = None
    if classic or not args.exact:
        studies = _materialize_studies(raw, args.input)
    if any(m in ("dl", "hk") for m in classic) and len(raw) < 2:
        raise InputError("dl and hk require at least two studies")

    tau2 = phi = None
    if combo:
        if args.exact:
            tau2, phi = 0.0, 1.0
        else:
            tau2, phi = _heterogeneity_for(args, studies)

    rows = []
    exit_code = 0
    for m in methods:
        if m in CLASSIC:
            rows.append(_classic_row(m, studies, args))
            continue
        f = _build_pfunction(m, args, studies, tables, tau2, phi)
        res = analyze(f, args.level)
        if not res.converged:
            exit_code = 3
        rows.append(
            {
                "method": m,
                "estimate": res.estimate,
                "lower": res.lower,
                "upper": res.upper,
                "p_value": res.p_null,
                "ci_width": res.width,
                "aucc": res.aucc,
                "ci_skewness": res.beta_skew,
                "aucc_ratio": res.aucc_ratio,
                "converged": res.converged,
                "tau2": tau2,
                "phi": phi,
            }
        )
    _write_rows(rows, ANALYZE_COLUMNS, args)
    return exit_code


def _default_drapery_grid(studies, tau2, phi):
    est = np.array([s.estimate for s in studies])
    se = np.array([math.sqrt(phi * s.se**2 + tau2) for s in studies])
    return float(np.min(est - 4 * se)), float(np.max(est + 4 * se)), 1001


def _cmd_drapery(args):
    raw, tables = _read_csv(args.input)
    methods = _parse_methods(args.method)
    if args.exact and tables is None:
        raise InputError("--exact requires the counts schema (id, e_t, n_t, e_c, n_c)")
    if args.exact and args.het != "none":
        raise InputError("the exact path does not support heterogeneity adjustment")

    combo = [m for m in methods if m in METHODS]
    classic = [m for m in methods if m in CLASSIC]
    studies = None
    if classic or not args.exact:
        studies = _materialize_studies(raw, args.input)
    tau2, phi = (0.0, 1.0)
    if combo and not args.exact:
        tau2, phi = _heterogeneity_for(args, studies)

    if args.grid:
        lo, hi, n = _parse_grid(args.grid)
    else:
        anchor_studies = studies if studies is not None else _materialize_studies(raw, args.input)
        lo, hi, n = _default_drapery_grid(anchor_studies, tau2, phi)
    mu = np.linspace(lo, hi, n)

    rows = []
    # per-study two-sided curves
    if args.exact:
        per_tab = [make_exact_pfunction([t], "edgington", args.alternative) for t in tables]
        study_ids = [f"study_{i + 1}" for i in range(len(tables))]
        for sid, f1 in zip(study_ids, per_tab):
            vals = centrality(f1, mu)
            rows.extend({"mu": float(g), "series": f"study:{sid}", "value": float(v)}
                        for g, v in zip(mu, vals))
    else:
        for s in studies:
            z = (mu - s.estimate) / math.sqrt(phi * s.se**2 + tau2)
            p = std_normal_cdf(z)
            vals = 2.0 * np.minimum(p, 1.0 - p)
            rows.extend({"mu": float(g), "series": f"study:{s.id}", "value": float(v)}
                        for g, v in zip(mu, vals))
    # per-method centrality curves
    for m in methods:
        if m in CLASSIC:
            vals = _classic_centrality(m, studies, args, mu)
        else:
            f = _build_pfunction(m, args, studies, tables, tau2, phi)
            vals = centrality(f, mu)
        rows.extend({"mu": float(g), "series": f"method:{m}", "value": float(v)}
                    for g, v in zip(mu, vals))
    _write_rows(rows, ["mu", "series", "value"], args)
    return 0


def _classic_centrality(method, studies, args, mu):
    """Two-sided curve of a classical pooled result: normal reference for
    fixed/dl, t_{k-1} for Hartung-Knapp."""
    from .special import student_t_cdf

    if method == "fixed":
        r = fixed_effect(studies, args.level)
    elif method == "dl":
        r = dl_random_effects(studies, args.level, args.tau2)
    else:
        r = hartung_knapp(studies, args.level, args.tau2)
    z = (mu - r.estimate) / r.se
    if method == "hk":
        p = student_t_cdf(z, len(studies) - 1)
    else:
        p = std_normal_cdf(z)
    return 2.0 * np.minimum(p, 1.0 - p)


def _cmd_density(args):
    raw, tables = _read_csv(args.input)
    methods = _parse_methods(args.method)
    if len(methods) != 1 or methods[0] not in METHODS:
        raise InputError("density requires exactly one combination method (e.g. --method edgington)")
    if args.exact and tables is None:
        raise InputError("--exact requires the counts schema (id, e_t, n_t, e_c, n_c)")
    if args.exact and args.het != "none":
        raise InputError("the exact path does not support heterogeneity adjustment")
    method = methods[0]

    studies = None
    if not args.exact:
        studies = _materialize_studies(raw, args.input)
        tau2, phi = _heterogeneity_for(args, studies)
        f = make_pfunction(studies, method, "greater", tau2=tau2, phi=phi)
    else:
        f = make_exact_pfunction(tables, method, "greater")

    grid = _parse_grid(args.grid) if args.grid else None
    mu, dens = confidence_density(f, grid)
    rows = [{"mu": float(g), "density": float(d)} for g, d in zip(mu, dens)]
    _write_rows(rows, ["mu", "density"], args)
    return 0


SIM_COLUMNS = [
    "k", "n_large", "i2", "alpha", "theta", "n_sim", "adjust", "base_seed",
    "estimand_mean", "estimand_median", "method", "n_converged",
    "convergence_rate", "coverage_mean", "coverage_mean_mcse",
    "coverage_median", "coverage_median_mcse", "bias_mean", "bias_mean_mcse",
    "bias_median", "bias_median_mcse", "width", "width_mcse", "aucc",
    "beta_mean", "beta_median", "beta_min", "beta_max",
    "kappa_beta_gamma", "kappa_aucc_ratio_gamma", "corr_beta_gamma",
]


def _as_list(value):
    return value if isinstance(value, list) else [value]


def _load_scenarios(path, seed_override):
    try:
        with open(path, encoding="utf-8") as fh:
            spec = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot open {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(spec, dict):
        raise InputError(f"{path}: scenario spec must be a JSON object")
    known = {"k", "n_large", "i2", "alpha", "theta", "n_sim", "base_seed", "adjust", "methods"}
    unknown = set(spec) - known
    if unknown:
        raise InputError(f"{path}: unknown scenario fields {sorted(unknown)}")
    for req in ("k", "i2", "n_sim"):
        if req not in spec:
            raise InputError(f"{path}: scenario spec missing required field {req!r}")
    base_seed = seed_override if seed_override is not None else spec.get("base_seed", 0)
    methods = spec.get("methods", list(ALL_METHODS))
    for m in methods:
        if m not in ALL_METHODS:
            raise InputError(f"{path}: unknown method {m!r} in scenario spec")
    scenarios = []
    try:
        for k, n_large, i2, alpha in itertools.product(
            _as_list(spec["k"]),
            _as_list(spec.get("n_large", 0)),
            _as_list(spec["i2"]),
            _as_list(spec.get("alpha", 0.0)),
        ):
            scenarios.append(
                SimScenario(
                    k=int(k),
                    n_large=int(n_large),
                    i2=float(i2),
                    alpha=float(alpha),
                    theta=float(spec.get("theta", 0.2)),
                    n_sim=int(spec["n_sim"]),
                    base_seed=int(base_seed),
                    adjust=spec.get("adjust", "none"),
                )
            )
    except (TypeError, ValueError) as exc:
        raise InputError(f"{path}: invalid scenario value: {exc}") from exc
    return scenarios, methods


def _cmd_simulate(args):
    scenarios, methods = _load_scenarios(args.input, args.seed)
    workers = args.threads if args.threads else default_workers()
    rows = []
    for sc in scenarios:
        summary = run_scenario(sc, methods=methods, workers=workers)
        for m in methods:
            perf = summary.methods[m]
            row = {
                "k": sc.k,
                "n_large": sc.n_large,
                "i2": sc.i2,
                "alpha": sc.alpha,
                "theta": sc.theta,
                "n_sim": sc.n_sim,
                "adjust": sc.adjust,
                "base_seed": sc.base_seed,
                "estimand_mean": summary.estimand_mean,
                "estimand_median": summary.estimand_median,
                "method": m,
                "n_converged": perf.n_converged,
                "convergence_rate": perf.convergence_rate,
                "coverage_mean": perf.coverage_mean,
                "coverage_mean_mcse": perf.coverage_mean_mcse,
                "coverage_median": perf.coverage_median,
                "coverage_median_mcse": perf.coverage_median_mcse,
                "bias_mean": perf.bias_mean,
                "bias_mean_mcse": perf.bias_mean_mcse,
                "bias_median": perf.bias_median,
                "bias_median_mcse": perf.bias_median_mcse,
                "width": perf.width,
                "width_mcse": perf.width_mcse,
                "aucc": perf.aucc,
                "beta_mean": perf.beta_mean,
                "beta_median": perf.beta_median,
                "beta_min": perf.beta_min,
                "beta_max": perf.beta_max,
                "kappa_beta_gamma": perf.kappa_beta_gamma,
                "kappa_aucc_ratio_gamma": perf.kappa_aucc_ratio_gamma,
                "corr_beta_gamma": perf.corr_beta_gamma,
            }
            rows.append(row)
    _write_rows(rows, SIM_COLUMNS, args)
    return 0


def _add_common_flags(sub):
    sub.add_argument("input", help="input CSV (studies) or JSON (scenario spec)")
    sub.add_argument("--method", default="all",
                     help="comma list from edgington,fisher,pearson,tippett,wilkinson,fixed,dl,hk or 'all'")
    sub.add_argument("--alternative", choices=("greater", "less"), default="less")
    sub.add_argument("--level", type=float, default=0.95)
    sub.add_argument("--het", choices=("none", "additive", "multiplicative"), default="none")
    sub.add_argument("--tau2", choices=("dl", "reml"), default="reml")
    sub.add_argument("--exact", action="store_true",
                     help="use exact mid-p study p-values (counts schema required)")
    sub.add_argument("--grid", default=None, metavar="LO:HI:N")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--threads", type=int, default=None,
                     help="worker count for simulate (fallback: CONFCURVE_THREADS, then 1)")
    sub.add_argument("--out", default=None, help="output path (default: stdout)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="confcurve",
        description="Meta-analysis with combined p-value functions",
    )
    subs = parser.add_subparsers(dest="cmd", required=True)
    for name, fn in (
        ("analyze", _cmd_analyze),
        ("drapery", _cmd_drapery),
        ("density", _cmd_density),
        ("simulate", _cmd_simulate),
    ):
        sub = subs.add_parser(name)
        _add_common_flags(sub)
        sub.set_defaults(fn=fn)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if not 0.0 < args.level < 1.0:
        print(f"confcurve: --level must lie in (0, 1), got {args.level}", file=sys.stderr)
        return 2
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"confcurve: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 1


def entrypoint():
    sys.exit(main())
