"""Completion-time-minimizing schedulers under an energy budget.

The strategy: anchor a prefix at the binding departure floor (or the last
arrival), solve it with the energy-optimal scheduler, then spend the leftover
budget on the remaining packets. The remainder is equalized when nothing
binds; when the balanced level would undershoot a forced departure (an arrival
or floor) or overrun a departure deadline, the packets up to the tightest such
bound are filled energy-optimally to that exact point and the remainder is
re-equalized. Anchored prefixes whose boundary subgroup would end up shorter
than the following fill are merged into it, subgroup by subgroup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .core import (
    CostModel,
    InfeasibleProblem,
    InsufficientBudget,
    ProblemInstance,
    Schedule,
    derive_bounds,
    total_cost,
    verify_schedule,
)
from .energy_sched import schedule_energy_two_sided
from .feasibility import check_feasibility, split_points
from .structure import classify

INF = math.inf


class CaseTag(str, Enum):
    CASE1 = "case1"
    CASE2A = "case2a"
    CASE2B_I = "case2b_i"
    CASE2B_II = "case2b_ii"


@dataclass(frozen=True)
class BudgetedInstance:
    instance: ProblemInstance
    cost: CostModel
    w_max: float

    def __post_init__(self):
        if not self.w_max > 0.0:
            raise ValueError("w_max must be positive")


@dataclass(frozen=True)
class TimeScheduleResult:
    schedule: Schedule
    t_c: float
    case_tag: CaseTag
    energy_used: float


def schedule_time_post(budgeted: BudgetedInstance) -> TimeScheduleResult:
    """Minimal completion time under departure floors only.

    Every pre-delay must be unbounded; each departure is still capped by the
    reference time.
    """
    if any(not math.isinf(p) for p in budgeted.instance.pre_delays):
        raise ValueError("schedule_time_post requires all pre-delays unbounded")
    return _schedule_time(budgeted)


def schedule_time_two_sided(budgeted: BudgetedInstance) -> TimeScheduleResult:
    """Minimal completion time under two-sided delay constraints."""
    return _schedule_time(budgeted)


class _Ctx:
    """Absolute-time bounds shared by the fill recursion."""

    def __init__(self, instance, cost, w_max, bounds):
        self.t = instance.arrivals
        self.posts = instance.post_delays
        self.t_r = instance.reference_time
        self.m = instance.size
        self.w = cost
        self.w_max = w_max
        self.nus = bounds.departure_deadlines
        self.floors = bounds.departure_floors
        self.end_time = bounds.end_time
        self.eps = bounds.eps
        # departure caps for the fill; the last packet's is the end time even
        # when its own pre-delay is unbounded
        self.caps = list(bounds.departure_deadlines)
        self.caps[-1] = bounds.end_time


def _energy_fill(ctx: _Ctx, a: int, b: int, start: float, end: float):
    """Energy-optimal fill of packets [a, b) over exactly [start, end].

    Returns (durations, cost) or None when the span cannot hold them. The
    sub-instance is rebased at ``start`` (arrivals clamped, deadlines and
    floors kept at their absolute positions).
    """
    rel_t = [max(ctx.t[i] - start, 0.0) for i in range(a, b)]
    pre = []
    for i in range(a, b - 1):
        p = ctx.nus[i] - start - rel_t[i - a]
        if not p > 0.0:
            return None
        pre.append(p)
    last = end - start - rel_t[b - 1 - a]
    if not last > 0.0 or end > ctx.nus[b - 1] + ctx.eps:
        return None
    pre.append(last)
    ref = ctx.t_r - start
    if ref > 0.0:
        posts = ctx.posts[a:b]
    else:
        # every floor lies behind the fill; neutralize them
        posts = (INF,) * (b - a)
        ref = end - start + 1.0
    try:
        sub = ProblemInstance(rel_t, pre, posts, ref)
        sched = schedule_energy_two_sided(sub)
    except (ValueError, InfeasibleProblem):
        return None
    return list(sched.durations), total_cost(sched, ctx.w)


def _fill(ctx: _Ctx, a: int, start: float, spent: float):
    """Spend the remaining budget on packets [a, m) from time ``start``.

    Equalizes whenever the balanced duration fits between the tightest forced
    departure from below (arrival or floor) and the tightest departure cap
    from above; otherwise saturates that bound with an energy-optimal front
    and recurses. Returns the durations, or None when the budget cannot cover
    a feasible fill (callers then merge the anchored prefix deeper).
    """
    out: list[float] = []
    eps = ctx.eps
    while a < ctx.m:
        w_r = ctx.w_max - spent
        if not w_r > 0.0:
            return None
        n = ctx.m - a
        level_lo, j_lo = -INF, -1
        level_hi, j_hi = INF, -1
        bound_lo = -INF
        for j in range(a, ctx.m):
            cnt = j - a + 1
            lb = ctx.floors[j]
            if j < ctx.m - 1 and ctx.t[j + 1] > lb:
                lb = ctx.t[j + 1]
            if lb > start:
                r = (lb - start) / cnt
                if r > level_lo + eps:
                    level_lo, j_lo, bound_lo = r, j, lb
                elif r >= level_lo - eps:
                    j_lo, bound_lo = j, lb  # ties take the longest front
                    if r > level_lo:
                        level_lo = r
            ub = ctx.caps[j]
            if not math.isinf(ub):
                r = (ub - start) / cnt
                if r < level_hi - eps:
                    level_hi, j_hi = r, j
                elif r <= level_hi + eps:
                    j_hi = j
                    if r < level_hi:
                        level_hi = r
        try:
            tau_eq = ctx.w.inverse(w_r / n)
        except ValueError:
            return None  # per-packet budget below the cost model's range
        if tau_eq < level_lo - eps:
            # forced lateness: saturate the binding arrival/floor as cheaply
            # as possible, leaving the most budget for the rest
            front_end = bound_lo
            got = _energy_fill(ctx, a, j_lo + 1, start, front_end)
            nxt = j_lo + 1
        elif tau_eq > level_hi + eps:
            # balanced spending would overrun the tightest departure cap
            front_end = ctx.caps[j_hi]
            got = _energy_fill(ctx, a, j_hi + 1, start, front_end)
            nxt = j_hi + 1
        else:
            if tau_eq > level_hi:
                tau_eq = level_hi  # fp dust from the inverse
            out.extend([tau_eq] * n)
            return out
        if got is None:
            return None
        durs, c = got
        out.extend(durs)
        spent += c
        if spent > ctx.w_max + 1e-9 * (1.0 + ctx.w_max):
            return None
        start = front_end
        a = nxt
    return out


def _schedule_time(budgeted: BudgetedInstance) -> TimeScheduleResult:
    inst = budgeted.instance
    w = budgeted.cost
    w_max = budgeted.w_max
    m = inst.size

    verdict = check_feasibility(inst)
    if not verdict.feasible:
        raise InfeasibleProblem(
            "infeasible instance: " + "; ".join(v.describe() for v in verdict.violations),
            violations=verdict.violations,
        )
    if split_points(inst):
        raise ValueError(
            "instance has forced idle (inter-arrival gap exceeds a pre-delay); "
            "the budgeted completion-time problem does not decompose"
        )
    b = derive_bounds(inst)
    budget_slack = 1e-12 * (1.0 + w_max)

    base = schedule_energy_two_sided(inst)
    minimal = total_cost(base, w)
    if minimal > w_max + budget_slack:
        raise InsufficientBudget(required=minimal)

    ctx = _Ctx(inst, w, w_max, b)
    floors = b.departure_floors
    t_last = inst.arrivals[-1]
    f_max = max(floors)

    tag, anchor_count, anchor_end = _dispatch(inst, floors, f_max, t_last, b.eps)
    if tag is CaseTag.CASE2B_I:
        # probe: is the hard minimum T_c = floor of the last packet affordable?
        got = _energy_fill(ctx, 0, m, 0.0, f_max)
        if got is not None and got[1] <= w_max + budget_slack:
            return _finish(budgeted, Schedule(got[0]), CaseTag.CASE2B_I)
        tag = CaseTag.CASE2B_II
        anchor_count, anchor_end = _second_anchor(inst, floors, t_last, b.eps)

    tau_b: list[float] = []
    sizes: tuple[int, ...] = ()
    if anchor_count >= 1:
        got = _energy_fill(ctx, 0, anchor_count, 0.0, anchor_end)
        if got is not None:
            tau_b = got[0]
            prefix_inst = _prefix_instance(inst, anchor_count, anchor_end)
            sizes = classify(prefix_inst, Schedule(tau_b)).subgroup_sizes()

    tau = _merge_and_fill(ctx, tau_b, sizes)
    return _finish(budgeted, Schedule(tau), tag)


def _prefix_instance(instance: ProblemInstance, count: int, end: float) -> ProblemInstance:
    pre = list(instance.pre_delays[:count])
    pre[-1] = end - instance.arrivals[count - 1]
    return ProblemInstance(
        arrivals=instance.arrivals[:count],
        pre_delays=pre,
        post_delays=instance.post_delays[:count],
        reference_time=instance.reference_time,
    )


def _dispatch(inst, floors, f_max, t_last, eps):
    m = inst.size
    if f_max > t_last + eps:
        attained = [j for j in range(m) if floors[j] >= f_max - eps]
        i_star = attained[-1]
        if i_star == m - 1:
            return CaseTag.CASE2B_I, m, f_max  # probe resolved by the caller
        return CaseTag.CASE2A, i_star + 1, floors[i_star]
    # floors end by the last arrival; an interior floor right at it still
    # anchors a prefix (a plain last-arrival prefix would squeeze the packets
    # behind it to zero duration)
    interior_at = [j for j in range(m - 1) if floors[j] >= t_last - eps]
    if interior_at:
        j = interior_at[-1]
        return CaseTag.CASE2A, j + 1, floors[j]
    return CaseTag.CASE1, m - 1, t_last


def _second_anchor(inst, floors, t_last, eps):
    m = inst.size
    interior = floors[:-1]
    if interior and max(interior) >= t_last - eps:
        best = max(interior)
        j = max(i for i in range(m - 1) if floors[i] >= best - eps)
        return j + 1, floors[j]
    return m - 1, t_last


def _merge_and_fill(ctx: _Ctx, tau_b, sizes):
    """Try anchored-prefix lengths from all subgroups down to none; at each
    level spend the leftover budget on the remainder and keep the first level
    whose fill is affordable and not longer than the boundary subgroup."""
    levels = [0]
    for nsize in sizes:
        levels.append(levels[-1] + nsize)
    prefix_dep = [0.0]
    prefix_cost = [0.0]
    for x in tau_b:
        prefix_dep.append(prefix_dep[-1] + x)
        prefix_cost.append(prefix_cost[-1] + ctx.w.evaluate(x))

    for k in reversed(levels):
        fill = _fill(ctx, k, prefix_dep[k], prefix_cost[k])
        if fill is None:
            continue
        if k > 0:
            boundary = tau_b[k - 1]
            if fill[0] > boundary * (1.0 + 1e-12) + 1e-15:
                continue  # the fill starts longer than the boundary subgroup
        return tau_b[:k] + fill
    raise RuntimeError("internal: no prefix level admits the budget")


def _finish(budgeted: BudgetedInstance, schedule: Schedule, tag: CaseTag) -> TimeScheduleResult:
    inst = budgeted.instance
    used = total_cost(schedule, budgeted.cost)
    if used > budgeted.w_max * (1.0 + 1e-9) + 1e-12:
        raise RuntimeError("internal: completion-time schedule overruns the budget")
    report = verify_schedule(inst, schedule, budgeted.cost, full_span=False)
    if not report.all_ok:
        raise RuntimeError("internal: completion-time schedule violates constraints")
    return TimeScheduleResult(
        schedule=schedule,
        t_c=schedule.departures[-1],
        case_tag=tag,
        energy_used=used,
    )
