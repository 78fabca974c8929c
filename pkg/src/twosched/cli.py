"""Command-line interface: feasibility checks, scheduling, and benchmark sweeps.

Exit codes: 0 success, 1 domain-negative (infeasible instance, constraint or
oracle-delta failure), 2 input error, 3 insufficient energy budget.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import bench
from .core import (
    CostModel,
    InfeasibleProblem,
    InsufficientBudget,
    ProblemInstance,
    cost_model_from_spec,
    derive_bounds,
    inverse_cost,
    total_cost,
)
from .energy_sched import schedule_energy_two_sided
from .feasibility import check_feasibility, decompose, split_points
from .oracle import OracleConfig, oracle_energy, oracle_time
from .structure import classify
from .time_sched import BudgetedInstance, schedule_time_two_sided

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3

SCHEMA_VERSION = 1


class InstanceFileError(ValueError):
    """Malformed instance file; ``field`` points at the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _bound_list(raw, field: str, n: int) -> list:
    if not isinstance(raw, list):
        raise InstanceFileError(field, "expected a list")
    if len(raw) != n:
        raise InstanceFileError(field, f"expected {n} entries, got {len(raw)}")
    out = []
    for i, v in enumerate(raw):
        if isinstance(v, str):
            if v.strip().lower() not in ("inf", "infinity", "+inf"):
                raise InstanceFileError(f"{field}[{i}]", f"not a number or 'inf': {v!r}")
            out.append(math.inf)
        elif isinstance(v, (int, float)) and not isinstance(v, bool):
            out.append(float(v))
        else:
            raise InstanceFileError(f"{field}[{i}]", f"not a number: {v!r}")
    return out


def parse_instance_document(doc: dict):
    """Validate a parsed instance document; returns (instance, cost, w_max)."""
    if not isinstance(doc, dict):
        raise InstanceFileError("$", "top level must be an object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise InstanceFileError("schema_version", f"expected {SCHEMA_VERSION}, got {version!r}")
    arrivals = doc.get("arrivals")
    if not isinstance(arrivals, list) or not arrivals:
        raise InstanceFileError("arrivals", "expected a nonempty list of numbers")
    for i, v in enumerate(arrivals):
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise InstanceFileError(f"arrivals[{i}]", f"not a number: {v!r}")
    n = len(arrivals)
    pre = _bound_list(doc.get("pre_delays"), "pre_delays", n)
    post = _bound_list(doc.get("post_delays"), "post_delays", n)
    t_r = doc.get("reference_time")
    if not isinstance(t_r, (int, float)) or isinstance(t_r, bool):
        raise InstanceFileError("reference_time", f"not a number: {t_r!r}")
    try:
        instance = ProblemInstance(arrivals, pre, post, float(t_r))
    except ValueError as err:
        raise InstanceFileError("$", str(err)) from err

    cost = None
    if "cost" in doc:
        spec = doc["cost"]
        if not isinstance(spec, dict) or "kind" not in spec:
            raise InstanceFileError("cost", "expected an object with a 'kind'")
        kind = spec["kind"]
        if kind not in ("inverse", "shannon"):
            raise InstanceFileError("cost.kind", f"unknown kind: {kind!r}")
        bits = spec.get("bits")
        if bits is not None and (not isinstance(bits, (int, float)) or isinstance(bits, bool)):
            raise InstanceFileError("cost.bits", f"not a number: {bits!r}")
        cost = cost_model_from_spec(kind, bits)
    w_max = doc.get("w_max")
    if w_max is not None:
        if not isinstance(w_max, (int, float)) or isinstance(w_max, bool) or not w_max > 0:
            raise InstanceFileError("w_max", f"not a positive number: {w_max!r}")
        w_max = float(w_max)
    return instance, cost, w_max


def load_instance_file(path):
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise InstanceFileError("$", f"cannot read {path}: {err}") from err
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise InstanceFileError("$", f"invalid JSON: {err}") from err
    return parse_instance_document(doc)


def instance_document(instance: ProblemInstance, cost: CostModel | None = None,
                      w_max: float | None = None) -> dict:
    """Canonical serializable form; round-trips through parse_instance_document."""
    def enc(x):
        return "inf" if math.isinf(x) else x

    doc = {
        "schema_version": SCHEMA_VERSION,
        "arrivals": list(instance.arrivals),
        "pre_delays": [enc(x) for x in instance.pre_delays],
        "post_delays": [enc(x) for x in instance.post_delays],
        "reference_time": instance.reference_time,
    }
    if cost is not None:
        if cost.label == "inverse":
            doc["cost"] = {"kind": "inverse"}
        elif cost.label.startswith("shannon("):
            doc["cost"] = {"kind": "shannon", "bits": float(cost.label[8:-1])}
        else:
            raise ValueError(f"cannot serialize cost model {cost.label!r}")
    if w_max is not None:
        doc["w_max"] = w_max
    return doc


def dump_instance(instance, cost=None, w_max=None) -> str:
    return json.dumps(instance_document(instance, cost, w_max),
                      indent=2, sort_keys=True) + "\n"


def _structure_document(instance, schedule) -> dict:
    st = classify(instance, schedule)
    return {
        "groups": [
            {
                "packets": [g.start, g.stop],
                "kind": g.kind,
                "subgroups": [
                    {"packets": [sg.start, sg.stop], "kind": sg.kind,
                     "duration": sg.duration}
                    for sg in g.subgroups
                ],
            }
            for g in st.groups
        ],
        "labels": [
            {"index": lab.index, "regular_end": lab.regular_end,
             "pre_critical": lab.pre_critical, "post_critical": lab.post_critical}
            for lab in st.labels
        ],
    }


def cmd_check(args) -> int:
    instance, _, _ = load_instance_file(args.path)
    bounds = derive_bounds(instance)
    verdict = check_feasibility(instance)
    for k in range(instance.size):
        lo = bounds.departure_floors[k]
        hi = bounds.departure_deadlines[k]
        print(f"packet {k}: valid departure region [{_fmt(lo)}, {_fmt(hi)}]")
    if not verdict.feasible:
        print("infeasible")
        for v in verdict.violations:
            print(f"  rule {v.rule}: {v.describe()}")
        return EXIT_DOMAIN
    print("feasible")
    segs = decompose(instance).segments
    if len(segs) > 1:
        print(f"decomposes into {len(segs)} independent segments:")
        for seg in segs:
            print(f"  packets [{seg.start}, {seg.stop}) starting at t={seg.origin:g}")
    else:
        print("single segment (no forced idle)")
    return EXIT_OK


def cmd_schedule(args) -> int:
    instance, file_cost, file_wmax = load_instance_file(args.path)
    cost = file_cost or inverse_cost()
    out: dict = {"objective": args.objective, "cost": cost.label}
    if args.objective == "energy":
        segs = decompose(instance).segments
        if len(segs) > 1 and args.oracle_check:
            pass  # oracle handles forced idle natively
        durations: list[float] = []
        departures: list[float] = []
        cost_total = 0.0
        for seg in segs:
            sched = schedule_energy_two_sided(seg.instance)
            durations.extend(sched.durations)
            departures.extend(seg.origin + s for s in sched.departures)
            cost_total += total_cost(sched, cost)
        out["durations"] = durations
        out["departures"] = departures
        out["total_cost"] = cost_total
        out["completion_time"] = sum(durations)
        if len(segs) == 1:
            from .core import Schedule
            out["structure"] = _structure_document(instance, Schedule(durations))
        if args.oracle_check:
            _, oracle_cost = oracle_energy(instance, cost,
                                           derive_bounds(instance).end_time,
                                           OracleConfig(mode="descent"))
            delta = abs(cost_total - oracle_cost)
            out["oracle_cost"] = oracle_cost
            out["oracle_delta"] = delta
            if delta > 1e-6 * (1.0 + oracle_cost):
                _emit(out, args.out)
                print("oracle check FAILED", file=sys.stderr)
                return EXIT_DOMAIN
    else:
        w_max = args.w_max if args.w_max is not None else file_wmax
        if w_max is None:
            raise InstanceFileError("w_max", "time objective needs w_max (file field or --w-max)")
        budgeted = BudgetedInstance(instance, cost, w_max)
        result = schedule_time_two_sided(budgeted)
        out["durations"] = list(result.schedule.durations)
        out["departures"] = list(result.schedule.departures)
        out["total_cost"] = result.energy_used
        out["completion_time"] = result.t_c
        out["case"] = result.case_tag.value
        out["w_max"] = w_max
        out["structure"] = _structure_document(instance, result.schedule)
        if args.oracle_check:
            _, oracle_tc = oracle_time(budgeted, OracleConfig(mode="descent"))
            delta = abs(result.t_c - oracle_tc)
            out["oracle_completion_time"] = oracle_tc
            out["oracle_delta"] = delta
            if delta > 1e-6 * max(1.0, derive_bounds(instance).end_time):
                _emit(out, args.out)
                print("oracle check FAILED", file=sys.stderr)
                return EXIT_DOMAIN
    _emit(out, args.out)
    return EXIT_OK


def _emit(doc: dict, out_path) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "-inf" if x < 0 else "inf"
    return f"{x:g}"


def cmd_sweep(args) -> int:
    cost = cost_model_from_spec(args.cost, args.bits)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.figure == "fig6":
        d = bench.FIG6_DEFAULTS
        spec = bench.GeneratorSpec(size=d["size"], t_r=d["t_r"], window=d["windows"][0],
                                   seed=args.seed, trials=args.trials)
        report = bench.sweep_energy(spec, d["windows"], cost)
        name = "fig6"
    elif args.figure == "fig7":
        d = bench.FIG7_DEFAULTS
        spec = bench.GeneratorSpec(size=d["size"], t_r=d["t_r"], window=d["window"],
                                   seed=args.seed, trials=args.trials)
        report = bench.sweep_time(spec, d["budgets"], cost)
        name = "fig7"
    else:
        spec = bench.GeneratorSpec(size=args.size, t_r=args.t_r, window=args.window,
                                   seed=args.seed, trials=args.trials)
        if args.mode == "energy":
            if not args.windows:
                raise InstanceFileError("--windows", "energy sweeps need a window ladder")
            report = bench.sweep_energy(spec, args.windows, cost)
        else:
            if not args.budgets:
                raise InstanceFileError("--budgets", "time sweeps need a budget ladder")
            report = bench.sweep_time(spec, args.budgets, cost)
        name = "custom"
    csv_path = out_dir / f"sweep_{name}.csv"
    json_path = out_dir / f"sweep_{name}.json"
    bench.write_report_csv(report, csv_path)
    bench.write_report_json(report, json_path)
    print(f"wrote {csv_path} and {json_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="twosched",
        description="Offline packet scheduling under two-sided delay constraints",
    )
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="feasibility verdict and decomposition")
    c.add_argument("path")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("schedule", help="solve an instance file")
    s.add_argument("path")
    s.add_argument("--objective", choices=("energy", "time"), default="energy")
    s.add_argument("--oracle-check", action="store_true",
                   help="cross-check against the independent oracle")
    s.add_argument("--w-max", type=float, default=None,
                   help="energy budget override for the time objective")
    s.add_argument("--out", default=None, help="write the result JSON here")
    s.set_defaults(func=cmd_schedule)

    w = sub.add_parser("sweep", help="benchmark sweeps over random instances")
    w.add_argument("--figure", choices=("fig6", "fig7"), default=None)
    w.add_argument("--mode", choices=("energy", "time"), default="energy")
    w.add_argument("--size", type=int, default=5)
    w.add_argument("--t-r", type=float, default=20.0)
    w.add_argument("--window", type=float, default=3.0)
    w.add_argument("--windows", type=float, nargs="*", default=None)
    w.add_argument("--budgets", type=float, nargs="*", default=None)
    w.add_argument("--trials", type=int, default=1000)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--cost", choices=("inverse", "shannon"), default="inverse")
    w.add_argument("--bits", type=float, default=None)
    w.add_argument("--out-dir", default=".")
    w.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InstanceFileError as err:
        print(f"input error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except InsufficientBudget as err:
        print(f"insufficient budget: minimal required is {err.required!r}", file=sys.stderr)
        return EXIT_BUDGET
    except InfeasibleProblem as err:
        print(f"infeasible: {err}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
