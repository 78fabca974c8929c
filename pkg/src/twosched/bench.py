"""Random-instance generation, constraint-blind baselines, and sweep harness.

Instances give every packet the valid departure region [t_i + T, t_i + 2T].
Baselines schedule with some constraints removed; success is judged packet by
packet against the original two-sided window, and every transmission counts
toward the total (drops waste energy and time). Reports aggregate both as
sum-of-totals over sum-of-successes and as a mean of per-trial ratios.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, asdict
from enum import Enum

import numpy as np

from .core import (
    CostModel,
    InsufficientBudget,
    ProblemInstance,
    Schedule,
    derive_bounds,
    total_cost,
)
from .energy_sched import schedule_energy_two_sided, schedule_single_deadline
from .feasibility import check_feasibility, decompose
from .time_sched import BudgetedInstance, schedule_time_post, schedule_time_two_sided

INF = math.inf


@dataclass(frozen=True)
class GeneratorSpec:
    size: int
    t_r: float
    window: float  # half-width T of the valid departure region
    seed: int
    trials: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("need at least one packet")
        if not 2.0 * self.window < self.t_r:
            raise ValueError("need 2*window < t_r")
        if not self.window > 0.0:
            raise ValueError("window must be positive")
        if self.trials < 1:
            raise ValueError("trials must be positive")


class BaselineKind(str, Enum):
    TWO_SIDED = "two_sided"
    PRE_ONLY = "pre_only"
    POST_ONLY = "post_only"
    NO_INDIVIDUAL = "no_individual"


ALL_BASELINES = (
    BaselineKind.TWO_SIDED,
    BaselineKind.PRE_ONLY,
    BaselineKind.POST_ONLY,
    BaselineKind.NO_INDIVIDUAL,
)


def generate_instance(spec: GeneratorSpec, trial_index: int = 0,
                      axis_index: int = 0) -> ProblemInstance:
    """Deterministic random instance: PCG64 streams split per (axis, trial).

    Arrivals are uniform on [0, t_r - 2T], sorted and shifted so t_1 = 0;
    pre-delays are 2T and post-delays t_r - t_i - T, so each packet's valid
    departure region is [t_i + T, t_i + 2T].
    """
    ss = np.random.SeedSequence(entropy=spec.seed, spawn_key=(axis_index, trial_index))
    rng = np.random.Generator(np.random.PCG64(ss))
    span = spec.t_r - 2.0 * spec.window
    for _ in range(100):
        draws = np.sort(rng.uniform(0.0, span, size=spec.size))
        if spec.size == 1 or np.all(np.diff(draws) > 0.0):
            break
    else:
        raise RuntimeError("could not draw strictly increasing arrivals")
    arrivals = draws - draws[0]
    pre = [2.0 * spec.window] * spec.size
    post = [spec.t_r - t - spec.window for t in arrivals]
    return ProblemInstance(arrivals.tolist(), pre, post, spec.t_r)


def _reduced(instance: ProblemInstance, kind: BaselineKind) -> ProblemInstance:
    drop_pre = kind in (BaselineKind.POST_ONLY, BaselineKind.NO_INDIVIDUAL)
    drop_post = kind in (BaselineKind.PRE_ONLY, BaselineKind.NO_INDIVIDUAL)
    return ProblemInstance(
        arrivals=instance.arrivals,
        pre_delays=(INF,) * instance.size if drop_pre else instance.pre_delays,
        post_delays=(INF,) * instance.size if drop_post else instance.post_delays,
        reference_time=instance.reference_time,
    )


@dataclass(frozen=True)
class BaselineRun:
    kind: str
    feasible: bool
    successes: int
    total: float  # energy or completion time spent, 0.0 for infeasible trials
    departures: tuple[float, ...] | None

    @property
    def metric(self) -> float:
        if self.successes == 0:
            return INF
        return self.total / self.successes


def _count_successes(instance: ProblemInstance, departures) -> int:
    b = derive_bounds(instance)
    eps = b.eps
    ok = 0
    for k, s in enumerate(departures):
        if b.departure_floors[k] - eps <= s <= b.departure_deadlines[k] + eps:
            ok += 1
    return ok


def run_baseline(instance: ProblemInstance, kind: BaselineKind, cost: CostModel,
                 mode: str = "energy", w_max: float | None = None) -> BaselineRun:
    """Schedule with the baseline's reduced constraint set, then judge success
    against the original instance."""
    reduced = _reduced(instance, kind)
    if mode == "energy":
        if not check_feasibility(reduced).feasible:
            return BaselineRun(kind.value, False, 0, 0.0, None)
        if kind is BaselineKind.NO_INDIVIDUAL:
            d = derive_bounds(reduced).inter_arrivals
            sched = schedule_single_deadline(d, derive_bounds(reduced).end_time)
            deps = sched.departures
            spent = total_cost(sched, cost)
        else:
            deps = []
            spent = 0.0
            for seg in decompose(reduced).segments:
                sub = schedule_energy_two_sided(seg.instance)
                deps.extend(seg.origin + s for s in sub.departures)
                spent += total_cost(sub, cost)
        successes = _count_successes(instance, deps)
        return BaselineRun(kind.value, True, successes, spent, tuple(deps))
    if mode == "time":
        if w_max is None:
            raise ValueError("time mode needs w_max")
        budgeted = BudgetedInstance(reduced, cost, w_max)
        solver = (schedule_time_post
                  if kind in (BaselineKind.POST_ONLY, BaselineKind.NO_INDIVIDUAL)
                  else schedule_time_two_sided)
        try:
            result = solver(budgeted)
        except (InsufficientBudget, ValueError) as err:
            # also lands here when forced idle makes the time problem undefined
            if isinstance(err, ValueError) and not isinstance(err, InsufficientBudget) \
                    and "forced idle" not in str(err):
                raise
            return BaselineRun(kind.value, False, 0, 0.0, None)
        successes = _count_successes(instance, result.schedule.departures)
        return BaselineRun(kind.value, True, successes, result.t_c,
                           result.schedule.departures)
    raise ValueError(f"unknown mode: {mode!r}")


@dataclass(frozen=True)
class SweepRow:
    axis: float
    baseline: str
    trials: int
    successes_total: int
    totals_sum: float
    metric_agg: float  # sum of totals / sum of successes
    metric_mean_of_ratios: float  # over trials with at least one success
    infeasible_trials: int


@dataclass(frozen=True)
class TrialRecord:
    axis: float
    trial: int
    baseline: str
    feasible: bool
    successes: int
    total: float


@dataclass(frozen=True)
class SweepReport:
    mode: str  # "energy" | "time"
    axis_name: str  # "window" | "w_max"
    spec: GeneratorSpec
    rows: tuple[SweepRow, ...]
    records: tuple[TrialRecord, ...]

    def row(self, axis: float, baseline: BaselineKind) -> SweepRow:
        for r in self.rows:
            if r.axis == axis and r.baseline == baseline.value:
                return r
        raise KeyError((axis, baseline))


def _aggregate(mode, axis_name, spec, records):
    rows = []
    by_key: dict[tuple[float, str], list[TrialRecord]] = {}
    for rec in records:
        by_key.setdefault((rec.axis, rec.baseline), []).append(rec)
    for (axis, baseline), recs in sorted(by_key.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        succ = sum(r.successes for r in recs)
        # fixed summation order keeps reports bitwise reproducible
        totals = math.fsum(r.total for r in sorted(recs, key=lambda r: r.trial))
        ratios = [r.total / r.successes for r in recs if r.successes > 0]
        rows.append(SweepRow(
            axis=axis,
            baseline=baseline,
            trials=len(recs),
            successes_total=succ,
            totals_sum=totals,
            metric_agg=totals / succ if succ else INF,
            metric_mean_of_ratios=math.fsum(ratios) / len(ratios) if ratios else INF,
            infeasible_trials=sum(not r.feasible for r in recs),
        ))
    return SweepReport(mode=mode, axis_name=axis_name, spec=spec,
                       rows=tuple(rows), records=tuple(records))


def sweep_energy(spec: GeneratorSpec, windows, cost: CostModel) -> SweepReport:
    """Run all four baselines over a ladder of window half-widths T."""
    records = []
    for ai, t_window in enumerate(windows):
        axis_spec = GeneratorSpec(spec.size, spec.t_r, float(t_window), spec.seed, spec.trials)
        for trial in range(spec.trials):
            inst = generate_instance(axis_spec, trial_index=trial, axis_index=ai)
            for kind in ALL_BASELINES:
                run = run_baseline(inst, kind, cost, mode="energy")
                records.append(TrialRecord(float(t_window), trial, kind.value,
                                           run.feasible, run.successes, run.total))
    return _aggregate("energy", "window", spec, records)


def sweep_time(spec: GeneratorSpec, budgets, cost: CostModel) -> SweepReport:
    """Run all four baselines over a ladder of energy budgets w_max."""
    records = []
    for ai, w_max in enumerate(budgets):
        for trial in range(spec.trials):
            # same instances at every budget so the curves are comparable
            inst = generate_instance(spec, trial_index=trial, axis_index=0)
            for kind in ALL_BASELINES:
                run = run_baseline(inst, kind, cost, mode="time", w_max=float(w_max))
                records.append(TrialRecord(float(w_max), trial, kind.value,
                                           run.feasible, run.successes, run.total))
    return _aggregate("time", "w_max", spec, records)


CSV_COLUMNS = ("axis", "baseline", "trials", "successes_total", "metric_agg",
               "metric_mean_of_ratios", "infeasible_trials")


def write_report_csv(report: SweepReport, path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(CSV_COLUMNS)
        for r in report.rows:
            out.writerow([repr(r.axis), r.baseline, r.trials, r.successes_total,
                          _num(r.metric_agg), _num(r.metric_mean_of_ratios),
                          r.infeasible_trials])


def write_report_json(report: SweepReport, path) -> None:
    doc = {
        "mode": report.mode,
        "axis_name": report.axis_name,
        "spec": asdict(report.spec),
        "rows": [_jsonable(asdict(r)) for r in report.rows],
        "trials": [_jsonable(asdict(r)) for r in report.records],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _num(x: float):
    return "inf" if math.isinf(x) else repr(x)


def _jsonable(d: dict) -> dict:
    return {k: ("inf" if isinstance(v, float) and math.isinf(v) else v)
            for k, v in d.items()}


# default experiment parameterizations for the two published comparisons
FIG6_DEFAULTS = dict(size=30, t_r=100.0, windows=(1.0, 2.0, 4.0, 8.0, 16.0, 24.0, 32.0))
FIG7_DEFAULTS = dict(size=5, t_r=20.0, window=3.0,
                     budgets=(2.0, 3.0, 4.5, 7.0, 10.0))
