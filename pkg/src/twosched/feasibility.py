"""Feasibility of the two-sided problem and decomposition at forced idle points.

A packet's departure window is [t_R - post_i, t_i + pre_i]. Feasibility needs
every window nonempty and, under FIFO, every later packet's deadline strictly
after every earlier packet's floor. An inter-arrival gap larger than the
pre-delay forces idle time and splits the instance into independent segments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    INF,
    InfeasibleProblem,
    ProblemInstance,
    equality_tolerance,
)

RULE_NECESSARY = "necessary"
RULE_FIFO_STRICT = "fifo_strict"
RULE_VALIDITY = "validity"


@dataclass(frozen=True)
class Violation:
    """One broken feasibility rule; ``j`` is the earlier packet of a FIFO pair."""

    rule: str
    index: int
    other: int | None = None

    def describe(self) -> str:
        if self.rule == RULE_FIFO_STRICT:
            return (f"packet {self.index}: deadline not after the floor of "
                    f"earlier packet {self.other} ({self.rule})")
        return f"packet {self.index}: {self.rule}"


@dataclass(frozen=True)
class FeasibilityVerdict:
    feasible: bool
    violations: tuple[Violation, ...]


@dataclass(frozen=True)
class Segment:
    """Contiguous packet range [start, stop) scheduled independently.

    ``origin`` is the absolute start time of the segment; ``instance`` is the
    self-contained sub-instance with arrivals (and reference time) shifted by
    -origin so absolute deadline/floor semantics are preserved.
    """

    start: int
    stop: int
    origin: float
    instance: ProblemInstance


@dataclass(frozen=True)
class Decomposition:
    segments: tuple[Segment, ...]

    @property
    def is_single(self) -> bool:
        return len(self.segments) == 1


def check_feasibility(instance: ProblemInstance) -> FeasibilityVerdict:
    """Decide two-sided feasibility; the verdict lists every violated rule.

    Rules: per-packet window nonempty ("necessary"), strict FIFO compatibility
    of every (earlier floor, later deadline) pair ("fifo_strict"), and the end
    time lying after the last arrival ("validity").
    """
    t = instance.arrivals
    t_r = instance.reference_time
    m = instance.size
    last_pre = instance.pre_delays[-1]
    end_time = t_r if math.isinf(last_pre) else t[-1] + last_pre
    eps = equality_tolerance(max(t_r, end_time))
    deadlines = [ti + pre for ti, pre in zip(t, instance.pre_delays)]
    floors = [t_r - post for post in instance.post_delays]

    violations: list[Violation] = []
    if not end_time > t[-1] + eps:
        violations.append(Violation(RULE_VALIDITY, m - 1))
    for i in range(m):
        if deadlines[i] < floors[i] - eps:
            violations.append(Violation(RULE_NECESSARY, i))
    for i in range(m):
        for j in range(i):
            # strict inequality, with equality-within-eps accepted as feasible
            if not deadlines[i] > floors[j] - eps:
                violations.append(Violation(RULE_FIFO_STRICT, i, j))
    return FeasibilityVerdict(feasible=not violations, violations=tuple(violations))


def split_points(instance: ProblemInstance) -> tuple[int, ...]:
    """Indices i (0-based) after which a forced idle splits the instance."""
    t = instance.arrivals
    pre = instance.pre_delays
    eps = equality_tolerance(instance.reference_time)
    return tuple(i for i in range(instance.size - 1)
                 if t[i + 1] - t[i] > pre[i] + eps)


def decompose(instance: ProblemInstance) -> Decomposition:
    """Split at every packet whose inter-arrival gap exceeds its pre-delay.

    Each segment internally satisfies d_i <= pre_i; segment floors and
    deadlines keep their absolute meaning (arrivals and reference time are
    shifted together by the segment origin).
    """
    verdict = check_feasibility(instance)
    if not verdict.feasible:
        raise InfeasibleProblem(
            "cannot decompose an infeasible instance",
            violations=verdict.violations,
        )
    cuts = split_points(instance)
    starts = [0] + [i + 1 for i in cuts]
    stops = [i + 1 for i in cuts] + [instance.size]
    segments = []
    for a, b in zip(starts, stops):
        origin = instance.arrivals[a]
        shifted_ref = instance.reference_time - origin
        if shifted_ref <= 0.0:
            raise ValueError(
                "segment starts at or after the reference time; "
                "cannot express its floors in a shifted instance"
            )
        sub = ProblemInstance(
            arrivals=[x - origin for x in instance.arrivals[a:b]],
            pre_delays=instance.pre_delays[a:b],
            post_delays=instance.post_delays[a:b],
            reference_time=shifted_ref,
        )
        segments.append(Segment(start=a, stop=b, origin=origin, instance=sub))
    return Decomposition(segments=tuple(segments))
