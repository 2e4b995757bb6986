"""Command-line interface: simulate, discover, decide, report.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 runtime
numeric failure. ``simulate`` resolves its grid from defaults, then an
optional JSON config file, then command-line flags (flags win).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import decide, discovery, figures, harness, synth
from .discovery import DiscoveryMethod
from .errors import DegenerateInputError, DegenerateSupportError, SingularDesignError
from .harness import SimulationConfig
from .synth import DgpKind, EffectSize

__version__ = "0.1.0"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

_NUMERIC_ERRORS = (DegenerateInputError, DegenerateSupportError, SingularDesignError)

_CONFIG_KEYS = {
    "sample_sizes", "dgp_kinds", "effect_sizes", "lambdas", "methods",
    "reps", "bootstrap_m", "master_seed", "threads",
}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _parse_list(text: str, convert, what: str) -> tuple:
    try:
        return tuple(convert(part.strip()) for part in text.split(",") if part.strip())
    except (ValueError, KeyError) as exc:
        raise CliError(f"invalid {what}: {text!r} ({exc})", EXIT_CONFIG) from exc


def _parse_dgp(token: str) -> DgpKind:
    return DgpKind(token.lower())


def _parse_effect(token: str) -> EffectSize:
    return EffectSize(token.lower())


def _parse_method(token: str) -> DiscoveryMethod:
    return DiscoveryMethod(token.lower())


def _load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read config file: {exc}", EXIT_CONFIG) from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"config file is not valid JSON: {exc}", EXIT_CONFIG) from exc
    if not isinstance(raw, dict):
        raise CliError("config file must contain a JSON object", EXIT_CONFIG)
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise CliError(f"unknown config keys: {sorted(unknown)}", EXIT_CONFIG)
    return raw


def _resolve_simulation_config(args) -> SimulationConfig:
    values: dict = {}
    if args.config:
        raw = _load_config_file(args.config)
        try:
            if "sample_sizes" in raw:
                values["sample_sizes"] = tuple(int(v) for v in raw["sample_sizes"])
            if "dgp_kinds" in raw:
                values["dgp_kinds"] = tuple(_parse_dgp(v) for v in raw["dgp_kinds"])
            if "effect_sizes" in raw:
                values["effect_sizes"] = tuple(_parse_effect(v) for v in raw["effect_sizes"])
            if "lambdas" in raw:
                values["lambdas"] = tuple(float(v) for v in raw["lambdas"])
            if "methods" in raw:
                values["methods"] = tuple(_parse_method(v) for v in raw["methods"])
            for key in ("reps", "bootstrap_m", "master_seed", "threads"):
                if key in raw and raw[key] is not None:
                    values[key] = int(raw[key])
        except (TypeError, ValueError) as exc:
            raise CliError(f"invalid config value: {exc}", EXIT_CONFIG) from exc
    if args.n is not None:
        values["sample_sizes"] = _parse_list(args.n, int, "--n")
    if args.dgp is not None:
        values["dgp_kinds"] = _parse_list(args.dgp, _parse_dgp, "--dgp")
    if args.effect is not None:
        values["effect_sizes"] = _parse_list(args.effect, _parse_effect, "--effect")
    if args.lambdas is not None:
        values["lambdas"] = _parse_list(args.lambdas, float, "--lambda")
    if args.method is not None:
        values["methods"] = _parse_list(args.method, _parse_method, "--method")
    if args.reps is not None:
        values["reps"] = args.reps
    if args.m is not None:
        values["bootstrap_m"] = args.m
    if args.seed is not None:
        values["master_seed"] = args.seed
    if args.threads is not None:
        values["threads"] = args.threads
    try:
        return SimulationConfig(**values)
    except ValueError as exc:
        raise CliError(f"invalid configuration: {exc}", EXIT_CONFIG) from exc


def _config_manifest(config: SimulationConfig) -> dict:
    return {
        "sample_sizes": list(config.sample_sizes),
        "dgp_kinds": [k.value for k in config.dgp_kinds],
        "effect_sizes": [s.value for s in config.effect_sizes],
        "lambdas": list(config.lambdas),
        "methods": [m.value for m in config.methods],
        "reps": config.reps,
        "bootstrap_m": config.bootstrap_m,
        "master_seed": config.master_seed,
        "threads": config.threads,
    }


def _ensure_outdir(path: str) -> None:
    try:
        os.makedirs(path, exist_ok=True)
        probe = os.path.join(path, ".write_probe")
        with open(probe, "w") as fh:
            fh.write("")
        os.remove(probe)
    except OSError as exc:
        raise CliError(f"output directory not writable: {exc}", EXIT_CONFIG) from exc


def cmd_simulate(args) -> int:
    config = _resolve_simulation_config(args)
    _ensure_outdir(args.out)
    records = harness.run_grid(config)
    harness.write_runs_csv(records, os.path.join(args.out, "runs.csv"))
    summaries = harness.aggregate(records, harness.GROUP_KEYS)
    harness.write_summary_csv(summaries, os.path.join(args.out, "summary.csv"))
    failures = [r for r in records if not r.ok]
    manifest = {
        "version": __version__,
        "config": _config_manifest(config),
        "master_seed": config.master_seed,
        "n_records": len(records),
        "n_failures": len(failures),
        "failed_runs": [
            {"cell": harness.canonical_cell_string(
                harness.Cell(r.n, r.dgp_kind, r.effect_size, r.lam, r.method)),
             "rep": r.rep_index, "status": r.status}
            for r in failures
        ],
    }
    with open(os.path.join(args.out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    print(f"wrote {len(records)} runs ({len(failures)} failed) to {args.out}")
    return EXIT_OK


def _load_sample(path: str, min_rows: int = 8) -> synth.BivariateSample:
    try:
        sample = synth.BivariateSample.from_csv(path)
    except OSError as exc:
        raise CliError(f"cannot read data file: {exc}", EXIT_DATA) from exc
    except ValueError as exc:
        raise CliError(f"bad data file: {exc}", EXIT_DATA) from exc
    if sample.n < min_rows:
        raise CliError(f"need at least {min_rows} data rows, got {sample.n}", EXIT_DATA)
    return sample


def cmd_discover(args) -> int:
    sample = _load_sample(args.data)
    method = _parse_method_arg(args.method)
    rng = np.random.default_rng(args.seed)
    try:
        posterior = discovery.bootstrap_posterior(sample, method, args.m, rng)
        score = discovery.score_sample(sample, method)
    except _NUMERIC_ERRORS as exc:
        raise CliError(f"discovery failed: {exc}", EXIT_NUMERIC) from exc
    payload = {
        "p_forward": posterior.p_forward,
        "method": method.value,
        "m": posterior.bootstrap_count,
        "n": sample.n,
        "scores_on_full_sample": {
            "forward": score.forward,
            "backward": score.backward,
            "favors_forward": score.favors_forward,
        },
    }
    print(json.dumps(payload, indent=2))
    return EXIT_OK


def cmd_decide(args) -> int:
    sample = _load_sample(args.data)
    method = _parse_method_arg(args.method)
    dgp_kind = _parse_dgp_arg(args.dgp_kind)
    lam = args.lam
    if lam < 0:
        raise CliError("--lambda must be >= 0", EXIT_CONFIG)
    rng = np.random.default_rng(args.seed)
    try:
        posterior = discovery.bootstrap_posterior(sample, method, args.m, rng)
        effect_hat = decide.estimate_effect(sample, dgp_kind)
        xs = sample.x
        effects = np.asarray(effect_hat(xs), dtype=float)
        a_ms = [decide.ms_action(posterior.p_forward, effect_hat, lam, float(x)) for x in xs]
        a_ma = [decide.ma_action(posterior.p_forward, effect_hat, lam, float(x)) for x in xs]
    except _NUMERIC_ERRORS as exc:
        raise CliError(f"decision pipeline failed: {exc}", EXIT_NUMERIC) from exc
    payload = {
        "p_forward": posterior.p_forward,
        "method": method.value,
        "m": posterior.bootstrap_count,
        "n": sample.n,
        "lambda": lam,
        "dgp_kind": dgp_kind.value,
        "x": [float(v) for v in xs],
        "effect_hat": [float(v) for v in effects],
        "a_ms": [float(v) for v in a_ms],
        "a_ma": [float(v) for v in a_ma],
    }
    print(json.dumps(payload, indent=2))
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        records = harness.read_runs_csv(args.runs)
    except OSError as exc:
        raise CliError(f"cannot read runs file: {exc}", EXIT_DATA) from exc
    except ValueError as exc:
        raise CliError(f"bad runs file: {exc}", EXIT_DATA) from exc
    _ensure_outdir(args.out)
    ok = [r for r in records if r.ok]
    if not ok:
        raise CliError("runs file contains no successful runs", EXIT_DATA)

    tables = {
        "summary_by_method": ("method",),
        "summary_by_effect_method": ("effect", "method"),
        "summary_by_lambda_method": ("lambda", "method"),
    }
    for name, keys in tables.items():
        summaries = harness.aggregate(records, keys)
        harness.write_summary_csv(summaries, os.path.join(args.out, f"{name}.csv"))
        with open(os.path.join(args.out, f"{name}.txt"), "w") as fh:
            fh.write(harness.summary_table_text(summaries))

    deltas = [r.delta_l for r in ok]
    try:
        ttest = harness.t_test_one_sample(deltas)
        trend = harness.ols_trend(records)
        trend_stats = {"slope": trend.slope, "t": trend.t, "p": trend.p}
    except (ValueError, DegenerateInputError) as exc:
        raise CliError(f"statistics failed: {exc}", EXIT_NUMERIC) from exc
    stats = {
        "n_runs": len(records),
        "n_failures": len(records) - len(ok),
        "mean_delta_l": float(np.mean(deltas)),
        "t_test": {"t": ttest.t, "p": ttest.p, "df": ttest.df},
        "sample_size_trend": trend_stats,
        "orderings": harness.prop3_trend_report(records),
    }
    with open(os.path.join(args.out, "stats.json"), "w") as fh:
        json.dump(stats, fh, indent=2)
        fh.write("\n")

    _write_figures(records, ok, trend_stats, args.out)
    print(f"report written to {args.out}")
    return EXIT_OK


def _write_figures(records, ok, trend_stats, outdir) -> None:
    by_method = {}
    for rec in ok:
        by_method.setdefault(rec.method.value, []).append(rec.delta_l)
    svg = figures.histogram_by_group(
        {k: np.asarray(v) for k, v in sorted(by_method.items())},
        "Loss difference by discovery method", "delta_l")
    _write(outdir, "fig_delta_hist.svg", svg)

    ns = np.asarray([r.n for r in ok], dtype=float)
    deltas = np.asarray([r.delta_l for r in ok], dtype=float)
    intercept = float(deltas.mean()) - trend_stats["slope"] * float(ns.mean())
    svg = figures.scatter_with_line(ns, deltas, trend_stats["slope"], intercept,
                                    "Loss difference vs sample size", "n", "delta_l")
    _write(outdir, "fig_delta_vs_n.svg", svg)

    for fname, key, title in (
        ("fig_effect_method.svg", "effect", "Mean loss difference by effect size"),
        ("fig_lambda_method.svg", "lambda", "Mean loss difference by intervention cost"),
    ):
        summaries = harness.aggregate(records, (key, "method"))
        groups = sorted({str(dict(s.group)[key]) for s in summaries})
        methods = sorted({dict(s.group)["method"] for s in summaries})
        series = {m: [next(s.mean_delta for s in summaries
                           if str(dict(s.group)[key]) == g and dict(s.group)["method"] == m)
                      for g in groups]
                  for m in methods}
        svg = figures.grouped_bar(groups, series, title, key, "mean delta_l")
        _write(outdir, fname, svg)


def _write(outdir, name, text) -> None:
    with open(os.path.join(outdir, name), "w") as fh:
        fh.write(text)


def _parse_method_arg(token: str) -> DiscoveryMethod:
    try:
        return DiscoveryMethod(token.lower())
    except ValueError:
        valid = ", ".join(m.value for m in DiscoveryMethod)
        raise CliError(f"invalid method {token!r}; valid values: {valid}", EXIT_CONFIG)


def _parse_dgp_arg(token: str) -> DgpKind:
    try:
        return DgpKind(token.lower())
    except ValueError:
        valid = ", ".join(k.value for k in DgpKind)
        raise CliError(f"invalid dgp kind {token!r}; valid values: {valid}", EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causalma",
        description="Bivariate causal discovery and decision simulation toolkit",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sim = sub.add_parser("simulate", help="run the factorial simulation grid")
    sim.add_argument("--config", help="JSON config file (flags override file values)")
    sim.add_argument("--n", help="comma-separated sample sizes, e.g. 10,50,100,500")
    sim.add_argument("--dgp", help="comma-separated DGP kinds: heteroskedastic,nonlinear")
    sim.add_argument("--effect", help="comma-separated effect sizes: small,large")
    sim.add_argument("--lambda", dest="lambdas", help="comma-separated intervention costs")
    sim.add_argument("--method", help="comma-separated discovery methods: anm,regression")
    sim.add_argument("--reps", type=int, help="replications per cell")
    sim.add_argument("--m", type=int, help="bootstrap resamples per replication")
    sim.add_argument("--seed", type=int, help="master seed")
    sim.add_argument("--threads", type=int, help="worker processes (default: all cores)")
    sim.add_argument("--out", default="out", help="output directory (default: ./out)")
    sim.set_defaults(func=cmd_simulate)

    dis = sub.add_parser("discover", help="estimate P(x->y) for a CSV data file")
    dis.add_argument("--data", required=True, help="CSV file with header x,y")
    dis.add_argument("--method", default="anm", help="anm or regression")
    dis.add_argument("--m", type=int, default=100, help="bootstrap resamples")
    dis.add_argument("--seed", type=int, default=0, help="random seed")
    dis.set_defaults(func=cmd_discover)

    dec = sub.add_parser("decide", help="compute decision-rule actions for a CSV data file")
    dec.add_argument("--data", required=True, help="CSV file with header x,y")
    dec.add_argument("--method", default="anm", help="anm or regression")
    dec.add_argument("--m", type=int, default=100, help="bootstrap resamples")
    dec.add_argument("--lambda", dest="lam", type=float, required=True,
                     help="intervention cost (>= 0)")
    dec.add_argument("--dgp-kind", dest="dgp_kind", required=True,
                     choices=[k.value for k in DgpKind],
                     help="effect estimator family")
    dec.add_argument("--seed", type=int, default=0, help="random seed")
    dec.set_defaults(func=cmd_decide)

    rep = sub.add_parser("report", help="summary tables, tests, and figures from runs.csv")
    rep.add_argument("--runs", required=True, help="runs.csv produced by simulate")
    rep.add_argument("--out", default="report", help="output directory")
    rep.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad flags, matching our config-error code
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
