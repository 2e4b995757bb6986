"""Factorial simulation grid: run, aggregate, and test.

One replication draws a structure, generates a sample, estimates the
structure posterior by bootstrap, estimates the forward effect, applies
both decision rules, and records the loss difference
``delta_l = loss_ms - loss_ma``. The grid is the cross product of sample
sizes, generator kinds, effect sizes, intervention costs, and discovery
methods.

Every replication derives its own random stream from a 64-bit hash of
(master seed, cell, replication index) and a counter-based generator, so
results are bit-identical no matter how many workers execute the grid.
"""

from __future__ import annotations

import csv
import hashlib
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from . import decide, discovery, synth
from .discovery import DiscoveryMethod
from .errors import DegenerateInputError, DegenerateSupportError, SingularDesignError
from .synth import CausalStructure, DgpKind, EffectSize

RUNS_CSV_HEADER = [
    "n", "dgp", "effect", "lambda", "method", "rep", "truth",
    "p_forward", "loss_ms", "loss_ma", "delta_l", "seed", "status",
]

GROUP_KEYS = ("n", "dgp", "effect", "lambda", "method")


class Cell(NamedTuple):
    n: int
    dgp_kind: DgpKind
    effect_size: EffectSize
    lam: float
    method: DiscoveryMethod


@dataclass(frozen=True)
class SimulationConfig:
    """Grid specification; the defaults give 64 cells x 100 reps = 6,400 runs."""

    sample_sizes: tuple[int, ...] = (10, 50, 100, 500)
    dgp_kinds: tuple[DgpKind, ...] = (DgpKind.HETEROSKEDASTIC, DgpKind.NONLINEAR)
    effect_sizes: tuple[EffectSize, ...] = (EffectSize.SMALL, EffectSize.LARGE)
    lambdas: tuple[float, ...] = (0.1, 0.9)
    methods: tuple[DiscoveryMethod, ...] = (DiscoveryMethod.ANM, DiscoveryMethod.REGRESSION)
    reps: int = 100
    bootstrap_m: int = 100
    master_seed: int = 1729
    threads: Optional[int] = None  # None = use all available cores

    def __post_init__(self) -> None:
        if self.reps < 1 or self.bootstrap_m < 1:
            raise ValueError("reps and bootstrap_m must be >= 1")
        if not all(n >= 1 for n in self.sample_sizes):
            raise ValueError("sample sizes must be >= 1")
        if any(lam < 0 for lam in self.lambdas):
            raise ValueError("lambdas must be >= 0")
        for field in ("sample_sizes", "dgp_kinds", "effect_sizes", "lambdas", "methods"):
            if not getattr(self, field):
                raise ValueError(f"{field} must be nonempty")

    def cells(self) -> list[Cell]:
        return [
            Cell(n, kind, size, lam, method)
            for n in self.sample_sizes
            for kind in self.dgp_kinds
            for size in self.effect_sizes
            for lam in self.lambdas
            for method in self.methods
        ]

    @property
    def n_runs(self) -> int:
        return len(self.cells()) * self.reps


@dataclass(frozen=True)
class RunRecord:
    n: int
    dgp_kind: DgpKind
    effect_size: EffectSize
    lam: float
    method: DiscoveryMethod
    rep_index: int
    true_structure: CausalStructure
    p_forward: Optional[float]
    loss_ms: Optional[float]
    loss_ma: Optional[float]
    delta_l: Optional[float]
    seed_used: int
    status: str  # "ok" or "error:<ExceptionName>"

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def sort_key(self):
        return (self.n, self.dgp_kind.value, self.effect_size.value,
                self.lam, self.method.value, self.rep_index)


def canonical_cell_string(cell: Cell) -> str:
    return (f"n={cell.n}|dgp={cell.dgp_kind.value}|effect={cell.effect_size.value}"
            f"|lambda={cell.lam!r}|method={cell.method.value}")


def run_seed(master_seed: int, cell: Cell, rep_index: int) -> int:
    """Stable 64-bit per-run seed from the master seed, cell, and rep index."""
    key = f"{master_seed}|{canonical_cell_string(cell)}|rep={rep_index}"
    digest = hashlib.blake2b(key.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def run_replication(cell: Cell, rep_index: int, config: SimulationConfig) -> RunRecord:
    """Execute one replication of one cell; fitting failures become tagged records."""
    seed = run_seed(config.master_seed, cell, rep_index)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    spec = synth.default_spec(cell.dgp_kind, cell.effect_size)
    structure = synth.draw_structure(rng)
    try:
        sample = synth.generate_sample(spec, structure, cell.n, rng)
        posterior = discovery.bootstrap_posterior(sample, cell.method, config.bootstrap_m, rng)
        effect_hat = decide.estimate_effect(sample, cell.dgp_kind)
        outcome = decide.evaluate_decisions(
            sample, posterior.p_forward, effect_hat,
            synth.true_marginal_effect(spec, structure), structure, cell.lam,
        )
    except (DegenerateInputError, DegenerateSupportError, SingularDesignError) as exc:
        return RunRecord(cell.n, cell.dgp_kind, cell.effect_size, cell.lam, cell.method,
                         rep_index, structure, None, None, None, None, seed,
                         f"error:{type(exc).__name__}")
    return RunRecord(cell.n, cell.dgp_kind, cell.effect_size, cell.lam, cell.method,
                     rep_index, structure, posterior.p_forward,
                     outcome.loss_ms, outcome.loss_ma, outcome.delta_l, seed, "ok")


def _run_task(args) -> RunRecord:
    cell, rep_index, config = args
    return run_replication(cell, rep_index, config)


def run_grid(config: SimulationConfig) -> list[RunRecord]:
    """Run every (cell, rep) pair; output order is canonical regardless of workers."""
    tasks = [(cell, rep, config) for cell in config.cells() for rep in range(config.reps)]
    workers = config.threads if config.threads is not None else (os.cpu_count() or 1)
    if workers <= 1 or len(tasks) == 1:
        records = [_run_task(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (8 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_task, tasks, chunksize=chunk))
    records.sort(key=RunRecord.sort_key)
    return records


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CellSummary:
    """Mean / SD / SE of delta_l within one group of runs."""

    group: tuple[tuple[str, object], ...]
    n_runs: int
    mean_delta: float
    sd_delta: Optional[float]
    se_delta: Optional[float]


def _record_key(record: RunRecord, key: str):
    return {
        "n": record.n,
        "dgp": record.dgp_kind.value,
        "effect": record.effect_size.value,
        "lambda": record.lam,
        "method": record.method.value,
    }[key]


def aggregate(records: Sequence[RunRecord], group_by: Iterable[str]) -> list[CellSummary]:
    """Group ok-status records and summarize delta_l per group.

    SD uses the n-1 denominator; singleton groups report SD and SE as
    missing rather than zero.
    """
    group_by = tuple(group_by)
    for key in group_by:
        if key not in GROUP_KEYS:
            raise ValueError(f"unknown group key {key!r}")
    ok_records = [r for r in records if r.ok]
    if not ok_records:
        raise ValueError("no successful runs to aggregate")
    groups: dict[tuple, list[float]] = {}
    for rec in ok_records:
        key = tuple((k, _record_key(rec, k)) for k in group_by)
        groups.setdefault(key, []).append(rec.delta_l)
    summaries = []
    for key in sorted(groups, key=lambda k: tuple(kv[1] for kv in k)):
        deltas = np.asarray(groups[key])
        if len(deltas) > 1:
            sd = float(np.std(deltas, ddof=1))
            se = sd / math.sqrt(len(deltas))
        else:
            sd = se = None
        summaries.append(CellSummary(key, len(deltas), float(deltas.mean()), sd, se))
    return summaries


# ---------------------------------------------------------------------------
# Significance tests (Student-t tail via the regularized incomplete beta)
# ---------------------------------------------------------------------------

def _beta_cont_frac(a: float, b: float, x: float, max_iter: int = 400, eps: float = 3e-14) -> float:
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise RuntimeError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) via the continued-fraction expansion."""
    if not (a > 0.0 and b > 0.0):
        raise ValueError("a and b must be > 0")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    front = math.exp(math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                     + a * math.log(x) + b * math.log1p(-x))
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cont_frac(a, b, x) / a
    return 1.0 - front * _beta_cont_frac(b, a, 1.0 - x) / b


def student_t_two_sided_p(t: float, df: float) -> float:
    """Two-sided tail probability of Student's t with df degrees of freedom."""
    if df <= 0:
        raise ValueError("df must be > 0")
    if math.isinf(t):
        return 0.0
    if t == 0.0:
        return 1.0
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))


class TTestResult(NamedTuple):
    t: float
    p: float
    df: int


def t_test_one_sample(deltas) -> TTestResult:
    """One-sample t-test of mean zero with a two-sided p-value."""
    arr = np.asarray(deltas, dtype=float)
    if arr.ndim != 1 or len(arr) < 2:
        raise ValueError("need at least 2 observations")
    sd = float(np.std(arr, ddof=1))
    if sd <= 0.0:
        raise DegenerateInputError("t-test undefined for zero-variance input")
    n = len(arr)
    t = float(arr.mean()) / (sd / math.sqrt(n))
    return TTestResult(t, student_t_two_sided_p(t, n - 1), n - 1)


class TrendResult(NamedTuple):
    slope: float
    t: float
    p: float


def ols_trend(records: Sequence[RunRecord]) -> TrendResult:
    """OLS of delta_l on sample size over ok-status records.

    Returns the slope, its t statistic, and a two-sided p-value with
    n_records - 2 degrees of freedom.
    """
    ok_records = [r for r in records if r.ok]
    ns = np.asarray([r.n for r in ok_records], dtype=float)
    deltas = np.asarray([r.delta_l for r in ok_records], dtype=float)
    if len(set(ns.tolist())) < 3:
        raise ValueError("need at least 3 distinct sample sizes")
    n = len(ns)
    sxx = float(np.sum((ns - ns.mean()) ** 2))
    slope = float(np.sum((ns - ns.mean()) * (deltas - deltas.mean()))) / sxx
    intercept = float(deltas.mean()) - slope * float(ns.mean())
    ssr = float(np.sum((deltas - intercept - slope * ns) ** 2))
    df = n - 2
    sigma2 = ssr / df
    se = math.sqrt(sigma2 / sxx)
    if se == 0.0:
        t = 0.0 if slope == 0.0 else math.copysign(math.inf, slope)
        return TrendResult(slope, t, 1.0 if slope == 0.0 else 0.0)
    t = slope / se
    return TrendResult(slope, t, student_t_two_sided_p(t, df))


def prop3_trend_report(records: Sequence[RunRecord]) -> dict:
    """Mean delta_l split by effect size and by intervention cost.

    Flags (as violation messages) any method whose mean delta_l is strictly
    larger for small effects than large ones, or strictly larger at the
    high intervention cost than the low one.
    """
    ok_records = [r for r in records if r.ok]
    lams = sorted({r.lam for r in ok_records})
    sizes = {r.effect_size for r in ok_records}
    if len(lams) < 2 or len(sizes) < 2:
        raise ValueError("records must cover both effect sizes and both lambdas")
    by_effect = aggregate(ok_records, ("effect", "method"))
    by_lambda = aggregate(ok_records, ("lambda", "method"))
    eff_means = {(dict(s.group)["effect"], dict(s.group)["method"]): s.mean_delta
                 for s in by_effect}
    lam_means = {(dict(s.group)["lambda"], dict(s.group)["method"]): s.mean_delta
                 for s in by_lambda}
    violations = []
    methods = sorted({r.method.value for r in ok_records})
    for method in methods:
        large = eff_means.get((EffectSize.LARGE.value, method))
        small = eff_means.get((EffectSize.SMALL.value, method))
        if large is not None and small is not None and large < small:
            violations.append(f"{method}: mean delta_l smaller for large effects "
                              f"({large:.4g} < {small:.4g})")
        low = lam_means.get((lams[0], method))
        high = lam_means.get((lams[-1], method))
        if low is not None and high is not None and low < high:
            violations.append(f"{method}: mean delta_l smaller at lambda={lams[0]} "
                              f"({low:.4g} < {high:.4g})")
    return {
        "mean_delta_by_effect_method": {f"{k[0]}|{k[1]}": v for k, v in sorted(eff_means.items())},
        "mean_delta_by_lambda_method": {f"{k[0]}|{k[1]}": v for k, v in sorted(lam_means.items())},
        "violations": violations,
    }


# ---------------------------------------------------------------------------
# CSV serialization (17 significant digits: round-trip safe)
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_runs_csv(records: Sequence[RunRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RUNS_CSV_HEADER)
        for r in records:
            writer.writerow([
                r.n, r.dgp_kind.value, r.effect_size.value, _fmt(r.lam),
                r.method.value, r.rep_index, r.true_structure.value,
                _fmt(r.p_forward), _fmt(r.loss_ms), _fmt(r.loss_ma),
                _fmt(r.delta_l), r.seed_used, r.status,
            ])


def read_runs_csv(path) -> list[RunRecord]:
    with open(path, "r", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != RUNS_CSV_HEADER:
            raise ValueError(f"unexpected runs.csv header: {header!r}")
        records = []
        for row in reader:
            if not row:
                continue
            if len(row) != len(RUNS_CSV_HEADER):
                raise ValueError(f"malformed runs.csv row: {row!r}")
            opt = lambda s: None if s == "" else float(s)
            records.append(RunRecord(
                n=int(row[0]),
                dgp_kind=DgpKind(row[1]),
                effect_size=EffectSize(row[2]),
                lam=float(row[3]),
                method=DiscoveryMethod(row[4]),
                rep_index=int(row[5]),
                true_structure=CausalStructure(row[6]),
                p_forward=opt(row[7]),
                loss_ms=opt(row[8]),
                loss_ma=opt(row[9]),
                delta_l=opt(row[10]),
                seed_used=int(row[11]),
                status=row[12],
            ))
    if not records:
        raise ValueError("runs.csv contains no records")
    return records


def write_summary_csv(summaries: Sequence[CellSummary], path) -> None:
    if not summaries:
        raise ValueError("no summaries to write")
    keys = [k for k, _ in summaries[0].group]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(keys + ["n_runs", "mean_delta", "sd_delta", "se_delta"])
        for s in summaries:
            values = [v for _, v in s.group]
            writer.writerow([_fmt(v) for v in values]
                            + [s.n_runs, _fmt(s.mean_delta),
                               _fmt(s.sd_delta) if s.sd_delta is not None else "NA",
                               _fmt(s.se_delta) if s.se_delta is not None else "NA"])


def summary_table_text(summaries: Sequence[CellSummary]) -> str:
    """Aligned plain-text rendering of a summary table."""
    if not summaries:
        return ""
    keys = [k for k, _ in summaries[0].group]
    header = keys + ["n_runs", "mean_delta", "sd_delta", "se_delta"]
    rows = []
    for s in summaries:
        row = [str(v) for _, v in s.group]
        row.append(str(s.n_runs))
        row.append(f"{s.mean_delta:.6g}")
        row.append("NA" if s.sd_delta is None else f"{s.sd_delta:.6g}")
        row.append("NA" if s.se_delta is None else f"{s.se_delta:.6g}")
        rows.append(row)
    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) for i in range(len(header))]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(header))]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
    return "\n".join(lines) + "\n"
