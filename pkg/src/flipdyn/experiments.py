"""Monte Carlo experiments over the coupled walk, with exact side-checks.

Replicas are independent: replica i draws from a Philox stream keyed by
(seed, i), so results do not depend on scheduling, and reports are
aggregated in replica order.  Identical configs therefore produce
byte-identical reports regardless of worker count.  Workers are
processes (each owns its colorings and random stream); worker count 0
means automatic.

Each report carries normal-approximation 95% confidence intervals and,
where a single-step quantity has an exact enumeration counterpart
(terminating mass, stage-transition masses), the exact rational next to
the sampled estimate.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .classify import Stage, classify_color, gamma_bound, stage_step_masses, stage_walk, state_counts
from .constructions import ConstructionSpec, build_construction
from .coupling import terminating_mass, variable_length_coupling
from .dynamics import FlipProbabilities, resolve_probabilities
from .errors import CapacityError, InputError
from .graphs import NeighboringPair, read_pair_file

Z95 = 1.959963984540054


@dataclass(frozen=True)
class ExperimentConfig:
    """What to run: the start pair, the flip vector, and the replica plan."""

    seed: int
    replicas: int
    construction: Optional[ConstructionSpec] = None
    pair_file: Optional[str] = None
    probs: str = "mixed"
    step_cap: Optional[int] = None
    workers: int = 0

    def __post_init__(self) -> None:
        if self.replicas < 1:
            raise InputError("need replicas >= 1")
        if (self.construction is None) == (self.pair_file is None):
            raise InputError("exactly one of construction or pair_file is required")

    def resolve_pair(self) -> NeighboringPair:
        if self.construction is not None:
            return build_construction(self.construction)
        g, sigma, tau = read_pair_file(self.pair_file)
        if tau is None:
            raise InputError("pair file must contain both sigma and tau")
        return NeighboringPair(g, sigma, tau)

    def resolve_probs(self) -> FlipProbabilities:
        return resolve_probabilities(self.probs)


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    se: float
    ci_low: float
    ci_high: float
    n: int

    @staticmethod
    def from_values(values, n: Optional[int] = None) -> "MetricSummary":
        arr = np.asarray(values, dtype=float)
        count = len(arr) if n is None else n
        if len(arr) == 0:
            return MetricSummary(float("nan"), float("nan"), float("nan"), float("nan"), 0)
        mean = float(arr.mean())
        se = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
        return MetricSummary(mean, se, mean - Z95 * se, mean + Z95 * se, count)

    def as_dict(self) -> dict:
        return {
            "mean": self.mean,
            "se": self.se,
            "ci95": [self.ci_low, self.ci_high],
            "n": self.n,
        }


@dataclass
class ExperimentReport:
    """Aggregated metrics, exact counterparts, and pass/fail comparisons."""

    kind: str
    params: dict
    metrics: dict[str, MetricSummary] = field(default_factory=dict)
    exact: dict[str, str] = field(default_factory=dict)
    checks: dict[str, bool] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> str:
        payload = {
            "kind": self.kind,
            "params": self.params,
            "metrics": {k: v.as_dict() for k, v in sorted(self.metrics.items())},
            "exact": dict(sorted(self.exact.items())),
            "checks": dict(sorted(self.checks.items())),
            "counts": dict(sorted(self.counts.items())),
            "ok": self.ok,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        lines = [f"experiment: {self.kind}"]
        for key in sorted(self.params):
            lines.append(f"  {key} = {self.params[key]}")
        if self.metrics:
            lines.append("metrics (mean, se, 95% CI, n):")
            for name in sorted(self.metrics):
                m = self.metrics[name]
                lines.append(
                    f"  {name}: {m.mean:.6g} +- {m.se:.3g} "
                    f"[{m.ci_low:.6g}, {m.ci_high:.6g}] n={m.n}"
                )
        if self.exact:
            lines.append("exact quantities:")
            for name in sorted(self.exact):
                lines.append(f"  {name} = {self.exact[name]}")
        if self.counts:
            lines.append("counts:")
            for name in sorted(self.counts):
                lines.append(f"  {name} = {self.counts[name]}")
        if self.checks:
            lines.append("checks:")
            for name in sorted(self.checks):
                lines.append(f"  {name}: {'pass' if self.checks[name] else 'FAIL'}")
        lines.append(f"overall: {'ok' if self.ok else 'FAILED'}")
        return "\n".join(lines) + "\n"


def _fraction_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _replica_rng(seed: int, replica: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), replica]))


# ---------------------------------------------------------------------------
# worker plumbing: each process rebuilds the pair and probabilities once

_WORK: dict = {}


def _init_worker(config: ExperimentConfig, color: Optional[int]) -> None:
    _WORK["pair"] = config.resolve_pair()
    _WORK["probs"] = config.resolve_probs()
    _WORK["seed"] = config.seed
    _WORK["step_cap"] = config.step_cap
    _WORK["color"] = color


def _couple_replica(replica: int) -> tuple:
    pair, probs = _WORK["pair"], _WORK["probs"]
    rng = _replica_rng(_WORK["seed"], replica)
    try:
        rec = variable_length_coupling(pair, probs, rng, _WORK["step_cap"])
    except CapacityError:
        return (0, 1, 1, 0, 0)
    pre = NeighboringPair(pair.graph, rec.pre_stop_sigma, rec.pre_stop_tau)
    counts = state_counts(pre)
    return (rec.t_stop, rec.final_distance, 0, counts.n_bad, counts.n_good)


def _stage_replica(replica: int) -> tuple:
    pair, probs = _WORK["pair"], _WORK["probs"]
    rng = _replica_rng(_WORK["seed"], replica)
    try:
        result = stage_walk(pair, _WORK["color"], probs, rng, _WORK["step_cap"])
    except CapacityError:
        return (0, 0, 1)
    return (1 if result.outcome == Stage.GOOD_END else 0, result.steps, 0)


def _map_replicas(config: ExperimentConfig, fn, color: Optional[int] = None) -> list[tuple]:
    workers = config.workers if config.workers > 0 else min(os.cpu_count() or 1, 8)
    if workers <= 1 or config.replicas < 64:
        _init_worker(config, color)
        return [fn(i) for i in range(config.replicas)]
    import multiprocessing as mp

    ctx = mp.get_context("fork") if hasattr(os, "fork") else mp.get_context("spawn")
    with ctx.Pool(workers, initializer=_init_worker, initargs=(config, color)) as pool:
        chunk = max(1, config.replicas // (workers * 8))
        return list(pool.imap(fn, range(config.replicas), chunksize=chunk))


# ---------------------------------------------------------------------------


def _write_csv(path: str, header: tuple[str, ...], rows: list[tuple]) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("replica",) + header)
        for i, row in enumerate(rows):
            writer.writerow((i,) + row)


def run_coupling_experiment(
    config: ExperimentConfig, csv_path: Optional[str] = None
) -> ExperimentReport:
    """Variable-length coupling replicas from one start pair.

    Reports E[T_stop] against the drift bound nk/(k - d - 2), the mean
    final distance (and minus one), the largest single-run excursion
    against the width 2 n_max + 1, and the exact terminating-mass
    interval at the start state.  Cap overruns are counted, not fatal.
    Requires k >= d + 2 for the comparisons to make sense.
    """
    pair = config.resolve_pair()
    probs = config.resolve_probs()
    n, k, d = pair.graph.n, pair.k, pair.graph.degree(pair.v)
    if k < d + 2:
        raise InputError(f"need k >= d + 2, got k={k}, d={d}")
    rows = _map_replicas(config, _couple_replica)
    if csv_path:
        _write_csv(
            csv_path,
            ("t_stop", "final_distance", "exceeded_cap", "n_bad_pre", "n_good_pre"),
            rows,
        )
    done = [r for r in rows if r[2] == 0]
    exceeded = sum(r[2] for r in rows)

    report = ExperimentReport(
        kind="couple",
        params={
            "n": n,
            "k": k,
            "d": d,
            "probs": config.probs,
            "replicas": config.replicas,
            "seed": config.seed,
        },
    )
    report.counts["exceeded_cap"] = exceeded
    report.counts["completed"] = len(done)
    if done:
        t_stops = [r[0] for r in rows if r[2] == 0]
        finals = [r[1] for r in rows if r[2] == 0]
        report.metrics["t_stop"] = MetricSummary.from_values(t_stops)
        report.metrics["final_distance"] = MetricSummary.from_values(finals)
        fm = report.metrics["final_distance"]
        report.metrics["final_distance_minus_1"] = MetricSummary(
            fm.mean - 1, fm.se, fm.ci_low - 1, fm.ci_high - 1, fm.n
        )
        report.counts["max_excursion"] = max(finals)

    tm = terminating_mass(pair, probs)
    report.exact["terminating_mass"] = _fraction_str(tm)
    p2 = probs.mass(2)
    if k > d + 2:
        lo = Fraction(k - d - 2, n * k)
        hi = Fraction(k, n * k) + Fraction(2, n * k) * p2 * d
        report.exact["terminating_mass_low"] = _fraction_str(lo)
        report.exact["terminating_mass_high"] = _fraction_str(hi)
        report.checks["terminating_mass_in_interval"] = lo <= tm <= hi
        drift = float(Fraction(n * k, k - d - 2))
        report.exact["t_stop_drift_bound"] = f"{n * k}/{k - d - 2}"
        if done:
            ts = report.metrics["t_stop"]
            report.checks["t_stop_within_drift_bound"] = ts.ci_low <= drift
    w = 2 * probs.n_max + 1
    report.counts["excursion_width_limit"] = w
    if done:
        report.checks["excursion_within_width"] = report.counts["max_excursion"] <= w
    return report


def run_stage_experiment(
    config: ExperimentConfig, color: int, csv_path: Optional[str] = None
) -> ExperimentReport:
    """Stage-machine replicas from a pair in the Bad configuration at
    the tracked color, against the exact one-step masses and the
    GoodEnd-probability target (1/gamma)(k + 2 p_2 d)/(nk)."""
    from .classify import StateLabel

    pair = config.resolve_pair()
    probs = config.resolve_probs()
    if classify_color(pair, color) is not StateLabel.BAD:
        raise InputError(f"start pair is not in the Bad configuration at color {color}")
    n, k, d = pair.graph.n, pair.k, pair.graph.degree(pair.v)
    rows = _map_replicas(config, _stage_replica, color=color)
    if csv_path:
        _write_csv(csv_path, ("good_end", "steps", "exceeded_cap"), rows)
    good_end = [r[0] for r in rows]
    exceeded = sum(r[2] for r in rows)

    report = ExperimentReport(
        kind="stages",
        params={
            "n": n,
            "k": k,
            "d": d,
            "color": color,
            "probs": config.probs,
            "replicas": config.replicas,
            "seed": config.seed,
        },
    )
    report.counts["exceeded_cap"] = exceeded
    report.metrics["p_good_end"] = MetricSummary.from_values(good_end)
    report.metrics["steps"] = MetricSummary.from_values([r[1] for r in rows])

    masses = stage_step_masses(pair, color, probs)
    report.exact["mass_to_good"] = _fraction_str(masses.to_good)
    report.exact["mass_terminating"] = _fraction_str(masses.terminating)
    report.exact["bad_to_good_floor"] = _fraction_str(Fraction(4 * (k - d - 1), n * k))
    report.checks["bad_to_good_mass"] = masses.to_good >= Fraction(4 * (k - d - 1), n * k)
    if k > d + 2:
        gamma, _ = gamma_bound(k, d, probs.mass(2))
        target = (Fraction(k) + 2 * probs.mass(2) * d) / (gamma * n * k)
        report.exact["good_end_target"] = _fraction_str(target)
        pg = report.metrics["p_good_end"]
        report.checks["good_end_probability"] = pg.ci_high >= float(target)
    return report


def estimate_gamma_empirical(
    config: ExperimentConfig, csv_path: Optional[str] = None
) -> ExperimentReport:
    """Ratio of mean Bad-count to mean Good-count one step before the
    distance changes, with a delta-method confidence interval, compared
    against the analytic gamma bound."""
    pair = config.resolve_pair()
    probs = config.resolve_probs()
    n, k, d = pair.graph.n, pair.k, pair.graph.degree(pair.v)
    rows = _map_replicas(config, _couple_replica)
    if csv_path:
        _write_csv(
            csv_path,
            ("t_stop", "final_distance", "exceeded_cap", "n_bad_pre", "n_good_pre"),
            rows,
        )
    done = [r for r in rows if r[2] == 0]
    exceeded = sum(r[2] for r in rows)

    report = ExperimentReport(
        kind="gamma",
        params={
            "n": n,
            "k": k,
            "d": d,
            "probs": config.probs,
            "replicas": config.replicas,
            "seed": config.seed,
        },
    )
    report.counts["exceeded_cap"] = exceeded
    report.counts["completed"] = len(done)
    if not done:
        report.checks["ratio_below_gamma_bound"] = False
        return report

    bad = np.array([r[3] for r in done], dtype=float)
    good = np.array([r[4] for r in done], dtype=float)
    report.metrics["n_bad_pre_stop"] = MetricSummary.from_values(bad)
    report.metrics["n_good_pre_stop"] = MetricSummary.from_values(good)
    xbar, ybar = float(bad.mean()), float(good.mean())
    m = len(done)
    ratio = xbar / ybar
    if m > 1:
        vx = float(bad.var(ddof=1))
        vy = float(good.var(ddof=1))
        cxy = float(np.cov(bad, good, ddof=1)[0, 1])
        var_ratio = (
            vx / ybar**2 + (xbar**2) * vy / ybar**4 - 2 * xbar * cxy / ybar**3
        ) / m
        se = math.sqrt(max(var_ratio, 0.0))
    else:
        se = 0.0
    report.metrics["bad_good_ratio"] = MetricSummary(
        ratio, se, ratio - Z95 * se, ratio + Z95 * se, m
    )
    if k > d + 2:
        gamma, _ = gamma_bound(k, d, probs.mass(2))
        report.exact["gamma_bound"] = _fraction_str(gamma)
        report.checks["ratio_below_gamma_bound"] = ratio - Z95 * se <= float(gamma)
    return report
