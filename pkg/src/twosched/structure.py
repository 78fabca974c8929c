"""Schedule structure: criticality labels, groups, and equal-duration subgroups.

A group is a maximal packet range whose allocated interval begins and ends at
packet arrivals; a subgroup is a maximal run of equal durations inside it. The
subgroup's terminal packet names it: regular (ends at an arrival), pre-critical
(ends at its departure deadline), or post-critical (ends at its floor).
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import ProblemInstance, Schedule, derive_bounds

KIND_REGULAR = "regular"
KIND_PRE = "pre_critical"
KIND_POST = "post_critical"


@dataclass(frozen=True)
class PacketLabel:
    index: int
    regular_end: bool
    pre_critical: bool
    post_critical: bool


@dataclass(frozen=True)
class Subgroup:
    start: int
    stop: int
    duration: float
    kind: str

    @property
    def size(self) -> int:
        return self.stop - self.start


@dataclass(frozen=True)
class Group:
    start: int
    stop: int
    kind: str  # "R" (no critical packets) or "H" (at least one)
    subgroups: tuple[Subgroup, ...]


@dataclass(frozen=True)
class ScheduleStructure:
    labels: tuple[PacketLabel, ...]
    groups: tuple[Group, ...]

    @property
    def subgroups(self) -> tuple[Subgroup, ...]:
        return tuple(sg for g in self.groups for sg in g.subgroups)

    def subgroup_sizes(self) -> tuple[int, ...]:
        return tuple(sg.size for sg in self.subgroups)


def _same_duration(a: float, b: float) -> bool:
    # relative tolerance on durations, not on cumulative sums
    return abs(a - b) <= 1e-9 * max(1.0, abs(a), abs(b))


def classify(instance: ProblemInstance, schedule: Schedule) -> ScheduleStructure:
    """Label packets and decompose the schedule into groups and subgroups.

    The schedule must respect the instance's constraints (full-span equality is
    not required, so budgeted completion-time outputs classify too).
    """
    if schedule.size != instance.size:
        raise ValueError("schedule and instance disagree on packet count")
    b = derive_bounds(instance)
    eps = b.eps
    m = instance.size
    s = schedule.departures
    tau = schedule.durations

    cum_d = []
    acc = 0.0
    for x in b.inter_arrivals:
        acc += x
        cum_d.append(acc)

    for k in range(m):
        if s[k] > b.departure_deadlines[k] + eps or s[k] < b.departure_floors[k] - eps:
            raise ValueError(f"schedule violates packet {k}'s departure window")
        if k < m - 1 and s[k] < cum_d[k] - eps:
            raise ValueError(f"schedule idles before packet {k + 1}")
    if s[-1] > b.end_time + eps:
        raise ValueError("schedule runs past the end time")

    labels = tuple(
        PacketLabel(
            index=k,
            regular_end=abs(s[k] - cum_d[k]) <= eps,
            pre_critical=abs(s[k] - b.departure_deadlines[k]) <= eps,
            post_critical=abs(s[k] - b.departure_floors[k]) <= eps,
        )
        for k in range(m)
    )

    # a regular end opens a new group only when the duration changes across it,
    # otherwise an equalized run would split into degenerate singleton groups
    group_ranges = []
    start = 0
    for k in range(m):
        if k == m - 1 or (labels[k].regular_end and not _same_duration(tau[k], tau[k + 1])):
            group_ranges.append((start, k + 1))
            start = k + 1

    # subgroup runs, flattened first so terminal labels can look at neighbors
    runs: list[tuple[int, int]] = []
    for a, bnd in group_ranges:
        r0 = a
        for k in range(a + 1, bnd):
            if not _same_duration(tau[k], tau[k - 1]):
                runs.append((r0, k))
                r0 = k
        runs.append((r0, bnd))

    kinds: list[str] = []
    for idx, (a, bnd) in enumerate(runs):
        last = bnd - 1
        lab = labels[last]
        if lab.pre_critical and lab.post_critical:
            # coinciding bounds: choose the label consistent with the ordering
            # relations (pre-critical may be followed by longer durations)
            nxt = runs[idx + 1] if idx + 1 < len(runs) else None
            if nxt is not None and tau[nxt[0]] > tau[a] and not _same_duration(tau[nxt[0]], tau[a]):
                kinds.append(KIND_PRE)
            else:
                kinds.append(KIND_POST)
        elif lab.regular_end:
            kinds.append(KIND_REGULAR)
        elif lab.pre_critical:
            kinds.append(KIND_PRE)
        elif lab.post_critical:
            kinds.append(KIND_POST)
        else:
            # nothing binding (budget-limited tails); order-wise acts regular
            kinds.append(KIND_REGULAR)

    groups = []
    it = iter(zip(runs, kinds))
    for a, bnd in group_ranges:
        subgroups = []
        critical = any(labels[k].pre_critical or labels[k].post_critical
                       for k in range(a, bnd))
        while True:
            (r0, r1), kind = next(it)
            subgroups.append(Subgroup(start=r0, stop=r1, duration=tau[r0], kind=kind))
            if r1 == bnd:
                break
        groups.append(Group(start=a, stop=bnd, kind="H" if critical else "R",
                            subgroups=tuple(subgroups)))
    return ScheduleStructure(labels=labels, groups=tuple(groups))


def check_lemma1(structure: ScheduleStructure) -> list[str]:
    """Ordering relations between consecutive subgroups; empty list when all hold.

    Regular and post-critical subgroups must not be shorter than their
    successor; pre-critical subgroups must not be longer than theirs.
    """
    problems = []
    sgs = structure.subgroups
    for i in range(len(sgs) - 1):
        cur, nxt = sgs[i], sgs[i + 1]
        if _same_duration(cur.duration, nxt.duration):
            continue
        if cur.kind in (KIND_REGULAR, KIND_POST) and cur.duration < nxt.duration:
            problems.append(
                f"subgroup {i} ({cur.kind}, tau={cur.duration:g}) shorter than "
                f"successor (tau={nxt.duration:g})"
            )
        if cur.kind == KIND_PRE and cur.duration > nxt.duration:
            problems.append(
                f"subgroup {i} (pre_critical, tau={cur.duration:g}) longer than "
                f"successor (tau={nxt.duration:g})"
            )
    return problems
