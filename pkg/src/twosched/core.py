"""Domain types shared by every scheduler: problem instances, cost models,
schedules, and constraint verification.

All times are dimensionless reals. Unbounded delay bounds are IEEE infinity,
which keeps bound arithmetic total (no sentinel magic numbers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

INF = math.inf

_LN2 = math.log(2.0)


class InfeasibleProblem(ValueError):
    """A scheduler was invoked on an instance with no feasible schedule."""

    def __init__(self, message: str, violations=None):
        super().__init__(message)
        self.violations = tuple(violations or ())


class InsufficientBudget(ValueError):
    """The energy budget cannot cover the cheapest feasible schedule.

    ``required`` is the minimal budget that would make the problem solvable.
    """

    def __init__(self, required: float, message: str | None = None):
        super().__init__(message or f"energy budget too small; need at least {required!r}")
        self.required = float(required)


def as_bound(value) -> float:
    """Normalize a delay bound: accepts a positive number, None, or "inf"."""
    if value is None:
        return INF
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "+inf"):
            return INF
        raise ValueError(f"not a delay bound: {value!r}")
    v = float(value)
    if math.isnan(v):
        raise ValueError("delay bound may not be NaN")
    return v


def equality_tolerance(end_time: float) -> float:
    """Absolute tolerance used for every constraint-tightness test."""
    return 1e-9 * max(1.0, end_time)


@dataclass(frozen=True)
class ProblemInstance:
    """Immutable scheduling input.

    arrivals        strictly increasing, arrivals[0] == 0
    pre_delays      per-packet max time from arrival to departure (may be inf)
    post_delays     per-packet survival margin: departure >= t_R - post (may be inf)
    reference_time  the instant all packets must be delivered and still alive
    """

    arrivals: tuple[float, ...]
    pre_delays: tuple[float, ...]
    post_delays: tuple[float, ...]
    reference_time: float

    def __init__(self, arrivals: Sequence[float], pre_delays: Iterable,
                 post_delays: Iterable, reference_time: float):
        object.__setattr__(self, "arrivals", tuple(float(t) for t in arrivals))
        object.__setattr__(self, "pre_delays", tuple(as_bound(x) for x in pre_delays))
        object.__setattr__(self, "post_delays", tuple(as_bound(x) for x in post_delays))
        object.__setattr__(self, "reference_time", float(reference_time))
        self._validate()

    def _validate(self):
        m = len(self.arrivals)
        if m < 1:
            raise ValueError("need at least one packet")
        if len(self.pre_delays) != m or len(self.post_delays) != m:
            raise ValueError("arrivals, pre_delays, post_delays must have equal length")
        if self.arrivals[0] != 0.0:
            raise ValueError("first arrival must be 0 by convention")
        # simultaneous arrivals are allowed; the schedulers batch them
        for a, b in zip(self.arrivals, self.arrivals[1:]):
            if b < a:
                raise ValueError("arrivals must be non-decreasing")
        if any(not x > 0.0 for x in self.pre_delays):
            raise ValueError("pre_delays must be positive")
        if any(not x > 0.0 for x in self.post_delays):
            raise ValueError("post_delays must be positive")
        if not self.reference_time > 0.0:
            raise ValueError("reference_time must be positive")

    @property
    def size(self) -> int:
        return len(self.arrivals)


@dataclass(frozen=True)
class DerivedBounds:
    """Per-packet bounds precomputed from an instance.

    inter_arrivals      d_i = t_{i+1} - t_i, with the end time standing in for
                        the arrival after the last packet
    departure_deadlines nu_i = t_i + pre_i (inf when unbounded)
    departure_floors    t_R - post_i (-inf when unbounded)
    end_time            t_M + pre_M, or t_R when the last pre-delay is unbounded
    """

    inter_arrivals: tuple[float, ...]
    departure_deadlines: tuple[float, ...]
    departure_floors: tuple[float, ...]
    end_time: float

    @property
    def eps(self) -> float:
        return equality_tolerance(self.end_time)


def derive_bounds(instance: ProblemInstance) -> DerivedBounds:
    """Compute inter-arrival gaps, departure deadlines/floors, and the end time."""
    t = instance.arrivals
    t_r = instance.reference_time
    last_pre = instance.pre_delays[-1]
    end_time = t_r if math.isinf(last_pre) else t[-1] + last_pre
    d = tuple(b - a for a, b in zip(t, t[1:])) + (end_time - t[-1],)
    if not d[-1] > 0.0:
        raise ValueError("end time must lie strictly after the last arrival")
    deadlines = tuple(ti + pre for ti, pre in zip(t, instance.pre_delays))
    floors = tuple(t_r - post for post in instance.post_delays)
    return DerivedBounds(d, deadlines, floors, end_time)


@dataclass(frozen=True)
class CostModel:
    """Strictly convex, decreasing, positive per-transmission cost.

    ``evaluate`` maps a duration tau > 0 to its cost; ``inverse`` maps a cost
    back to the unique duration producing it.
    """

    evaluate: Callable[[float], float]
    inverse: Callable[[float], float]
    label: str

    def __call__(self, tau: float) -> float:
        return self.evaluate(tau)


def _inverse_eval(tau: float) -> float:
    if tau <= 0.0:
        raise ValueError("duration must be positive")
    return 1.0 / tau


def inverse_cost() -> CostModel:
    """w(tau) = 1/tau, with the analytic inverse."""
    return CostModel(evaluate=_inverse_eval, inverse=_inverse_eval, label="inverse")


def _shannon_eval(bits: float, tau: float) -> float:
    if tau <= 0.0:
        raise ValueError("duration must be positive")
    try:
        return tau * math.expm1(bits * _LN2 / tau)
    except OverflowError:
        return INF


def _shannon_invert(bits: float, c: float) -> float:
    # w decreases from +inf to bits*ln2; costs at or below that limit have no preimage.
    if c <= bits * _LN2:
        raise ValueError(f"cost {c!r} below the asymptotic floor of shannon({bits})")
    lo = hi = 1.0
    for _ in range(2200):
        if _shannon_eval(bits, lo) >= c:
            break
        lo *= 0.5
    for _ in range(2200):
        if _shannon_eval(bits, hi) <= c:
            break
        hi *= 2.0
    for _ in range(200):
        if hi - lo <= 1e-12 * lo:
            break
        mid = 0.5 * (lo + hi)
        if _shannon_eval(bits, mid) >= c:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def shannon_cost(bits: float = 1.0) -> CostModel:
    """w(tau) = tau * (2^(bits/tau) - 1); inverse by bisection to 1e-12 relative."""
    if not bits > 0.0:
        raise ValueError("bits must be positive")
    return CostModel(
        evaluate=lambda tau: _shannon_eval(bits, tau),
        inverse=lambda c: _shannon_invert(bits, c),
        label=f"shannon({bits:g})",
    )


def cost_model_from_spec(kind: str, bits: float | None = None) -> CostModel:
    if kind == "inverse":
        return inverse_cost()
    if kind == "shannon":
        return shannon_cost(1.0 if bits is None else bits)
    raise ValueError(f"unknown cost model kind: {kind!r}")


@dataclass(frozen=True)
class Schedule:
    """Transmission durations plus cached cumulative departure times."""

    durations: tuple[float, ...]
    departures: tuple[float, ...]

    def __init__(self, durations: Sequence[float]):
        durs = tuple(float(x) for x in durations)
        if not durs:
            raise ValueError("schedule must contain at least one duration")
        if any(not x > 0.0 for x in durs):
            raise ValueError("durations must be positive")
        deps = []
        acc = 0.0
        for x in durs:
            acc += x
            deps.append(acc)
        object.__setattr__(self, "durations", durs)
        object.__setattr__(self, "departures", tuple(deps))

    @property
    def size(self) -> int:
        return len(self.durations)


def total_cost(schedule: Schedule, cost: CostModel) -> float:
    """Sum of per-packet costs."""
    return sum(cost.evaluate(x) for x in schedule.durations)


def completion_time(schedule: Schedule) -> float:
    """Sum of all transmission durations."""
    return schedule.departures[-1]


@dataclass(frozen=True)
class VerificationReport:
    """Per-packet constraint outcomes for a (instance, schedule) pair.

    Violations are reported, never raised: a report with a False entry simply
    describes an invalid schedule.
    """

    non_idling_ok: tuple[bool, ...]
    pre_ok: tuple[bool, ...]
    post_ok: tuple[bool, ...]
    total_cost: float
    completion_time: float

    @property
    def all_ok(self) -> bool:
        return all(self.non_idling_ok) and all(self.pre_ok) and all(self.post_ok)

    def violation_count(self) -> int:
        return sum(not b for seq in (self.non_idling_ok, self.pre_ok, self.post_ok) for b in seq)


def verify_schedule(instance: ProblemInstance, schedule: Schedule, cost: CostModel,
                    full_span: bool = True) -> VerificationReport:
    """Evaluate the non-idling, pre-delay, and post-delay constraints.

    ``full_span=True`` requires the last departure to equal the end time
    exactly (the energy problem); ``full_span=False`` only requires it not to
    exceed the end time (the budgeted completion-time problem).
    """
    if schedule.size != instance.size:
        raise ValueError("schedule and instance disagree on packet count")
    b = derive_bounds(instance)
    eps = b.eps
    s = schedule.departures
    m = instance.size
    cum_d = []
    acc = 0.0
    for x in b.inter_arrivals:
        acc += x
        cum_d.append(acc)
    non_idling = []
    for k in range(m):
        if k < m - 1:
            non_idling.append(s[k] >= cum_d[k] - eps)
        elif full_span:
            non_idling.append(abs(s[k] - b.end_time) <= eps)
        else:
            non_idling.append(s[k] <= b.end_time + eps)
    pre = tuple(s[k] <= b.departure_deadlines[k] + eps for k in range(m))
    post = tuple(s[k] >= b.departure_floors[k] - eps for k in range(m))
    return VerificationReport(
        non_idling_ok=tuple(non_idling),
        pre_ok=pre,
        post_ok=post,
        total_cost=total_cost(schedule, cost),
        completion_time=completion_time(schedule),
    )
