"""Energy-minimizing offline schedulers.

Both schedulers equalize transmission durations as far as the constraints
allow. The single-deadline scheduler repeatedly allocates the prefix with the
largest mean inter-arrival gap; the two-sided scheduler generalizes this with
per-window candidate durations capped by departure deadlines and pushed up by
departure floors. Neither ever evaluates the cost model: the optimizer is the
same for every strictly convex decreasing cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import (
    CostModel,
    InfeasibleProblem,
    ProblemInstance,
    Schedule,
    derive_bounds,
    equality_tolerance,
)
from .feasibility import check_feasibility, split_points

CASE_REGULAR = "regular"
CASE_PRE = "pre_critical"
CASE_POST = "post_critical"


@dataclass
class Alg2State:
    """Call-local working state of the two-sided scheduler.

    cursor    index of the first unallocated packet
    origin    absolute time at which the next batch starts; every allocated
              duration sums to it
    durations allocated so far

    The working (clamped) arrival of packet j is max(t_j, origin) and its
    working pre-delay is nu_j minus that, so the fixed departure deadlines
    nu_j never increase. t_R,o in the relative formulation is t_R - origin.
    """

    cursor: int = 0
    origin: float = 0.0
    durations: list[float] = field(default_factory=list)

    def t_r_offset(self, reference_time: float) -> float:
        return reference_time - self.origin


def _select_candidate(cands, tie):
    """Largest candidate duration; ties within ``tie`` go to the candidate
    allocating the most packets."""
    max_tau = max(c[0] for c in cands)
    best = None
    for c in cands:
        if c[0] >= max_tau - tie:
            if best is None or c[1] > best[1] or (c[1] == best[1] and c[0] > best[0]):
                best = c
    return best


def arrivals_from_gaps(d) -> list[float]:
    """Cumulative arrival points implied by a gap vector (last point = end time)."""
    points = [0.0]
    acc = 0.0
    for x in d:
        acc += x
        points.append(acc)
    return points


def schedule_single_deadline(d, t_e: float) -> Schedule:
    """Optimal schedule under one common deadline: iterative max-mean prefixes.

    ``d`` holds the M inter-arrival gaps (the last entry runs to the end time);
    they must be positive and sum to ``t_e``.
    """
    d = [float(x) for x in d]
    if not d or any(not x > 0.0 for x in d):
        raise ValueError("inter-arrival gaps must be positive")
    tie = equality_tolerance(t_e)
    points = arrivals_from_gaps(d)
    if abs(points[-1] - t_e) > tie:
        raise ValueError("gaps must sum to the end time")
    m = len(d)
    out: list[float] = []
    c = 0
    while c < m:
        cands = [((points[c + k] - points[c]) / k, k) for k in range(1, m - c + 1)]
        _, n = _select_candidate(cands, tie)
        tau = (points[c + n] - points[c]) / n
        out.extend([tau] * n)
        c += n
    return Schedule(out)


def schedule_energy_two_sided(instance: ProblemInstance) -> Schedule:
    """Energy-optimal schedule under per-packet two-sided delay constraints.

    Requires a feasible instance with no forced idle (d_i <= pre_i for every
    inter-arrival gap; run feasibility.decompose first otherwise).
    """
    verdict = check_feasibility(instance)
    if not verdict.feasible:
        raise InfeasibleProblem(
            "infeasible instance: " + "; ".join(v.describe() for v in verdict.violations),
            violations=verdict.violations,
        )
    if split_points(instance):
        raise ValueError(
            "instance has forced idle (inter-arrival gap exceeds a pre-delay); "
            "decompose it into segments first"
        )
    b = derive_bounds(instance)
    t = instance.arrivals
    nu = b.departure_deadlines
    floors = b.departure_floors
    t_e = b.end_time
    tie = b.eps
    m = instance.size

    state = Alg2State()
    while state.cursor < m:
        c = state.cursor
        origin = state.origin
        n_rem = m - c
        cands = []
        run_min = math.inf  # tightest deadline-capped mean over packets seen so far
        run_min_j = -1
        for k in range(1, n_rem + 1):
            last = c + k - 1
            if k >= 2:
                jprev = last - 1
                if not math.isinf(nu[jprev]):
                    entry = (nu[jprev] - origin) / (k - 1)
                    if entry < run_min:
                        run_min, run_min_j = entry, jprev
            next_point = t[last + 1] if last + 1 < m else t_e
            work_next = next_point if next_point > origin else origin
            fill = (work_next - origin) / k
            floor_entry = (floors[last] - origin) / k
            last_entry = fill if fill >= floor_entry else floor_entry
            if run_min <= last_entry:
                # a deadline binds before the window fills; batch ends pre-critically
                cands.append((run_min, run_min_j - c + 1, CASE_PRE, nu[run_min_j]))
            elif fill >= floor_entry:
                cands.append((last_entry, k, CASE_REGULAR, work_next))
            else:
                cands.append((last_entry, k, CASE_POST, floors[last]))
        tau_cand, n, case, end = _select_candidate(cands, tie)
        if not end > origin or not tau_cand > 0.0:
            raise RuntimeError(
                "internal: degenerate batch (coinciding bounds squeeze a packet "
                f"to zero duration at index {c})"
            )
        tau = (end - origin) / n
        state.durations.extend([tau] * n)
        state.cursor = c + n
        state.origin = end

    sched = Schedule(state.durations)
    _validate_output(sched, t, nu, floors, t_e, tie)
    return sched


def _validate_output(sched, t, nu, floors, t_e, eps):
    # final guard against the original constraints; 4*eps absorbs accumulation
    tol = 4.0 * eps
    s = sched.departures
    m = len(s)
    if abs(s[-1] - t_e) > tol:
        raise RuntimeError("internal: schedule does not end at the end time")
    for k in range(m):
        lo = floors[k]
        if k < m - 1 and t[k + 1] > lo:
            lo = t[k + 1]
        if s[k] < lo - tol or s[k] > nu[k] + tol:
            raise RuntimeError(f"internal: schedule violates packet {k}'s constraints")


def cost_independence_check(instance: ProblemInstance, cost_a: CostModel,
                            cost_b: CostModel) -> bool:
    """True iff the two-sided scheduler yields bitwise-equal output under both
    cost models. The scheduler never evaluates a cost, so this asserts the
    structural fact rather than computing anything new."""
    del cost_a, cost_b  # intentionally unused by the optimizer
    first = schedule_energy_two_sided(instance)
    second = schedule_energy_two_sided(instance)
    return first.durations == second.durations
