"""Seeded instance generators shared by the property and acceptance suites."""

from __future__ import annotations

import math
import random

from twosched.core import ProblemInstance, derive_bounds, equality_tolerance

INF = math.inf


def random_feasible_instance(rng: random.Random, max_size: int = 6,
                             post_only: bool = False,
                             unbounded_prob: float = 0.3) -> ProblemInstance:
    """Constructively feasible instance with no forced idle.

    Pre-delays always cover the following gap; floors stay strictly below
    every later deadline so the FIFO condition holds.
    """
    m = rng.randint(1, max_size)
    t = [0.0]
    for _ in range(m - 1):
        t.append(t[-1] + rng.uniform(0.3, 4.0))
    pre = []
    for i in range(m):
        if post_only or rng.random() < unbounded_prob:
            pre.append(INF)
        else:
            gap = (t[i + 1] - t[i]) if i < m - 1 else 0.0
            pre.append(gap + rng.uniform(0.2, 6.0))
    nu = [t[i] + pre[i] for i in range(m)]
    finite_nu = [x for x in nu if not math.isinf(x)]
    t_r = max([t[-1] + 0.5] + [x + 0.5 for x in finite_nu]) + rng.uniform(0.0, 3.0)
    floors = []
    for i in range(m):
        if rng.random() < 0.4:
            floors.append(-INF)
        else:
            cap = min(min(nu[i:]), t_r)
            floors.append(rng.uniform(-3.0, cap - 0.05))
    post = [(t_r - f) if not math.isinf(f) else INF for f in floors]
    return ProblemInstance(t, pre, post, t_r)


def random_decomposable_instance(rng: random.Random, max_size: int = 6) -> ProblemInstance:
    """Feasible instance with at least one forced-idle split point."""
    m = rng.randint(2, max_size)
    n_splits = rng.randint(1, max(1, m // 2))
    split_at = set(rng.sample(range(m - 1), n_splits))
    t = [0.0]
    pre = []
    for i in range(m - 1):
        pre_i = rng.uniform(0.5, 4.0)
        if i in split_at:
            gap = pre_i + rng.uniform(0.3, 3.0)
        else:
            gap = rng.uniform(0.2, 1.0) * pre_i
        pre.append(pre_i)
        t.append(t[-1] + gap)
    pre.append(rng.uniform(0.5, 4.0))
    nu = [t[i] + pre[i] for i in range(m)]
    t_r = max(x + 0.5 for x in nu) + rng.uniform(0.0, 3.0)
    floors = []
    for i in range(m):
        if rng.random() < 0.5:
            floors.append(-INF)
        else:
            cap = min(min(nu[i:]), t_r)
            lo_bound = t[i] - 2.0
            floors.append(rng.uniform(lo_bound, cap - 0.05) if cap - 0.05 > lo_bound else -INF)
    post = [(t_r - f) if not math.isinf(f) else INF for f in floors]
    inst = ProblemInstance(t, pre, post, t_r)
    assert any(t[i + 1] - t[i] > pre[i] for i in range(m - 1))
    return inst


def grid_feasible(instance: ProblemInstance, steps: int = 400) -> bool:
    """Lattice existence check: ordered departures on a t_E/steps grid, each
    inside its packet's valid window."""
    b = derive_bounds(instance)
    h = b.end_time / steps
    eps = equality_tolerance(b.end_time)
    prev = 0.0
    for k in range(instance.size):
        lo = max(b.departure_floors[k], prev + h)
        idx = math.ceil((lo - eps) / h)
        point = idx * h
        if point < lo - eps:
            point = (idx + 1) * h
        hi = min(b.departure_deadlines[k], b.end_time)
        if point > hi + eps:
            return False
        prev = point
    return True
