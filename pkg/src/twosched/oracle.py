"""Independent ground-truth solvers for the energy and completion-time problems.

These deliberately share no logic with the production schedulers: the energy
problem is solved over departure-time variables inside an order-respecting box
(exhaustive lattice enumeration for small instances, projected first-order
descent otherwise), and the completion-time problem by bisecting the end time
against the budget. Desk scale only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    CostModel,
    InfeasibleProblem,
    InsufficientBudget,
    ProblemInstance,
    Schedule,
    derive_bounds,
    equality_tolerance,
)

_GAP_REL = 1e-12


class OracleConvergenceError(RuntimeError):
    """Descent hit the iteration cap; carries the best iterate found."""

    def __init__(self, message: str, best_departures, best_cost: float):
        super().__init__(message)
        self.best_departures = tuple(best_departures)
        self.best_cost = best_cost


@dataclass(frozen=True)
class OracleConfig:
    grid_points: int = 200
    max_iterations: int = 60000
    convergence_tol: float = 1e-13
    mode: str = "auto"  # "grid" | "descent" | "auto"

    def __post_init__(self):
        if self.grid_points < 50:
            raise ValueError("grid_points must be at least 50")
        if not self.convergence_tol > 0.0:
            raise ValueError("convergence_tol must be positive")
        if self.mode not in ("grid", "descent", "auto"):
            raise ValueError(f"unknown oracle mode: {self.mode!r}")


def _derivative(w, tau: float) -> float:
    # central difference; relative step keeps it accurate across magnitudes
    h = 1e-6 * tau
    a = w(tau + h)
    b = w(tau - h)
    if math.isinf(b) or math.isinf(a):
        # inside the singular wall of a cost like shannon's; any steep
        # negative slope pushes the iterate out
        return -1e300
    return (a - b) / (2.0 * h)


def _pava_nondecreasing(v):
    """Pool-adjacent-violators least-squares isotonic fit."""
    vals: list[float] = []
    wts: list[int] = []
    for x in v:
        vals.append(x)
        wts.append(1)
        while len(vals) >= 2 and vals[-2] > vals[-1]:
            b_v, b_w = vals.pop(), wts.pop()
            a_v, a_w = vals.pop(), wts.pop()
            vals.append((a_v * a_w + b_v * b_w) / (a_w + b_w))
            wts.append(a_w + b_w)
    out = []
    for val, wt in zip(vals, wts):
        out.extend([val] * wt)
    return out


def _project(v, lo, hi, gap):
    """Approximate projection onto {lo <= x <= hi, x strictly increasing}.

    Alternates box clipping with an isotonic pass (minimum separation ``gap``),
    at most 100 rounds.
    """
    m = len(v)
    x = list(v)
    scale = max(1.0, max(abs(a) for a in lo + hi if not math.isinf(a)) if m else 1.0)
    for _ in range(100):
        prev = x
        x = [min(max(x[k], lo[k]), hi[k]) for k in range(m)]
        shifted = [x[k] - k * gap for k in range(m)]
        iso = _pava_nondecreasing(shifted)
        x = [iso[k] + k * gap for k in range(m)]
        if max(abs(a - b) for a, b in zip(x, prev)) <= 1e-15 * scale:
            break
    return [min(max(x[k], lo[k]), hi[k]) for k in range(m)]


def _segment_bounds(start, end, arrivals, deadlines, floors, eps):
    """Tightened per-departure bounds for one segment; None when infeasible."""
    m = len(arrivals)
    lo = []
    hi = []
    for k in range(m - 1):
        l = floors[k]
        if arrivals[k + 1] > l:
            l = arrivals[k + 1]
        lo.append(l)
        hi.append(min(deadlines[k], end))
    if end < floors[m - 1] - eps or end > deadlines[m - 1] + eps or end <= start:
        return None
    acc = start
    for k in range(m - 1):
        if lo[k] > acc:
            acc = lo[k]
        else:
            lo[k] = acc
    run = end
    for k in range(m - 2, -1, -1):
        if hi[k] < run:
            run = hi[k]
        else:
            hi[k] = run
    for k in range(m - 1):
        if lo[k] > hi[k] + eps or lo[k] >= end:
            return None
        if lo[k] > hi[k]:
            hi[k] = lo[k]
    return lo, hi


def _objective(w, start, end, x):
    total = w(x[0] - start) if x else w(end - start)
    for a, b in zip(x, x[1:]):
        total += w(b - a)
    if x:
        total += w(end - x[-1])
    return total


def _min1d(w, a, b, lok, hik):
    """Exact minimizer of w(s - a) + w(b - s) over [lok, hik] (golden section)."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0

    def phi(s):
        return w(s - a) + w(b - s)

    x1, x2 = lok, hik
    c = x2 - inv_phi * (x2 - x1)
    d = x1 + inv_phi * (x2 - x1)
    fc, fd = phi(c), phi(d)
    for _ in range(90):
        if x2 - x1 <= 1e-13 * max(1.0, abs(x2)):
            break
        if fc <= fd:
            x2, d, fd = d, c, fc
            c = x2 - inv_phi * (x2 - x1)
            fc = phi(c)
        else:
            x1, c, fc = c, d, fd
            d = x1 + inv_phi * (x2 - x1)
            fd = phi(d)
    mid = 0.5 * (x1 + x2)
    return mid


def _coordinate_sweeps(w, start, end, lo, hi, x, gap, rounds):
    """Cyclic exact 1-D minimizations; rescues ill-conditioned boxes where
    plain gradient steps crawl. Keeps ordering by construction."""
    m = len(x)
    for _ in range(rounds):
        moved = 0.0
        for k in range(m):
            a = x[k - 1] if k else start
            b = x[k + 1] if k + 1 < m else end
            lok = max(lo[k], a + gap)
            hik = min(hi[k], b - gap)
            if hik < lok:
                continue
            s_new = _min1d(w, a, b, lok, hik)
            moved = max(moved, abs(s_new - x[k]))
            x[k] = s_new
        if moved <= 1e-14 * max(1.0, end):
            break
    return x


def _init_point(start, end, lo, hi, gap):
    """Ordered interior starting point: near-equal spacing nudged into the box,
    backing off from the end so no duration starts degenerate."""
    m = len(lo)
    delta = (end - start) / (m + 1)
    x = [0.0] * m
    prev = start
    for k in range(m):
        x[k] = min(max(lo[k], prev + delta), hi[k])
        prev = x[k]
    nxt = end
    for k in range(m - 1, -1, -1):
        room = nxt - max(lo[k], start)
        if room > 0.0:
            cap = nxt - 0.5 * min(delta, room)
            if x[k] > cap:
                x[k] = max(lo[k], cap)
        nxt = x[k]
    return _project(x, lo, hi, gap)


def _descent_segment(w, start, end, lo, hi, cfg):
    m = len(lo)
    if m == 0:
        return [], w(end - start)
    span = end - start
    gap = _GAP_REL * max(1.0, span)
    x = _init_point(start, end, lo, hi, gap)

    def f(pt):
        prev = start
        total = 0.0
        for v in pt:
            tau = v - prev
            if tau <= 0.0:
                return math.inf
            total += w(tau)
            prev = v
        tau = end - prev
        if tau <= 0.0:
            return math.inf
        return total + w(tau)

    def grad(pt):
        taus = []
        prev = start
        for v in pt:
            taus.append(v - prev)
            prev = v
        taus.append(end - prev)
        dw = [_derivative(w, tau) for tau in taus]
        return [dw[k] - dw[k + 1] for k in range(m)]

    fx = f(x)
    y = list(x)
    theta = 1.0
    step = None
    tol = cfg.convergence_tol
    stagnant = 0
    for it in range(cfg.max_iterations):
        fy = f(y)
        if math.isinf(fy):
            # momentum left the feasible region; restart from the best point
            y = list(x)
            theta = 1.0
            fy = fx
        g = grad(y)
        if step is None:
            gnorm = math.sqrt(sum(v * v for v in g))
            step = 0.1 * span / (gnorm or 1.0)
        step *= 2.0  # optimistic growth, the Armijo backtracking pays it back
        accepted = None
        for _ in range(60):
            z = _project([y[k] - step * g[k] for k in range(m)], lo, hi, gap)
            fz = f(z)
            dz2 = sum((z[k] - y[k]) ** 2 for k in range(m))
            if dz2 == 0.0:
                break
            if fz <= fy - 1e-4 * dz2 / step:
                accepted = (z, fz)
                break
            step *= 0.25
        if accepted is None or accepted[1] > fx:
            # monotone fallback: plain projected-gradient step from the best point
            gx = grad(x) if y != x else g
            sub = step
            accepted = (list(x), fx)
            for _ in range(60):
                z = _project([x[k] - sub * gx[k] for k in range(m)], lo, hi, gap)
                fz = f(z)
                if fz < fx:
                    accepted = (z, fz)
                    break
                sub *= 0.25
            y = list(accepted[0])
            theta = 1.0
        else:
            z, fz = accepted
            theta_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * theta * theta))
            beta = (theta - 1.0) / theta_next
            y = [z[k] + beta * (z[k] - x[k]) for k in range(m)]
            theta = theta_next
        improved = fx - accepted[1]
        x, fx = list(accepted[0]), accepted[1]
        # the polish also runs periodically: slow crawls out of the cost
        # singularity improve just enough every step to defeat the
        # stagnation count alone
        due = (it + 1) % 300 == 0
        if improved > tol * (1.0 + abs(fx)):
            stagnant = 0
            if not due:
                continue
        else:
            stagnant += 1
            if stagnant < 25 and not due:
                continue
        # stagnated: polish with exact coordinate minimizations, then accept
        # unless a fresh projected step still finds real descent
        polished = _coordinate_sweeps(w, start, end, lo, hi, list(x), gap, rounds=40)
        fp = f(polished)
        if fp < fx - tol * (1.0 + abs(fx)):
            x, fx = polished, fp
            y = list(x)
            theta = 1.0
            stagnant = 0
            continue
        if fp < fx:
            x, fx = polished, fp
        gx = grad(x)
        gnorm = math.sqrt(sum(v * v for v in gx))
        best_probe = None
        for trial in (1e-2 * span / (1.0 + gnorm), 1e-5 * span / (1.0 + gnorm), step):
            probe = _project([x[k] - trial * gx[k] for k in range(m)], lo, hi, gap)
            fq = f(probe)
            if best_probe is None or fq < best_probe[1]:
                best_probe = (probe, fq)
        if best_probe[1] < fx - tol * (1.0 + abs(fx)):
            x, fx = best_probe
            y = list(x)
            theta = 1.0
            stagnant = 0
        else:
            return x, fx
    raise OracleConvergenceError(
        f"descent did not converge in {cfg.max_iterations} iterations",
        x, fx,
    )


def _grid_segment(w, start, end, lo, hi, cfg):
    m = len(lo)
    if m == 0:
        return [], w(end - start)
    g = cfg.grid_points
    grids = []
    for k in range(m):
        if hi[k] - lo[k] <= 0.0:
            grids.append([lo[k]])
        else:
            stepk = (hi[k] - lo[k]) / (g - 1)
            grids.append([lo[k] + stepk * i for i in range(g)])
    best_cost = math.inf
    best: list[float] | None = None
    chosen = [0.0] * m

    def rec(k, prev, partial):
        nonlocal best_cost, best
        for v in grids[k]:
            if v <= prev:
                continue
            c = partial + w(v - prev)
            if c >= best_cost:
                continue  # positive costs only ever grow
            chosen[k] = v
            if k == m - 1:
                if end > v:
                    total = c + w(end - v)
                    if total < best_cost:
                        best_cost = total
                        best = chosen.copy()
            else:
                rec(k + 1, v, c)

    rec(0, start, 0.0)
    if best is None:
        raise InfeasibleProblem("grid found no order-respecting point in the box")
    return best, best_cost


def _solve_segment(w, start, end, arrivals, deadlines, floors, cfg, use_grid, eps):
    bounds = _segment_bounds(start, end, arrivals, deadlines, floors, eps)
    if bounds is None:
        raise InfeasibleProblem("empty feasible region for a segment")
    lo, hi = bounds
    if use_grid:
        x, cost_val = _grid_segment(w, start, end, lo, hi, cfg)
    else:
        x, cost_val = _descent_segment(w, start, end, lo, hi, cfg)
    prev = start
    durs = []
    for v in list(x) + [end]:
        durs.append(v - prev)
        prev = v
    return durs, cost_val


def _forced_splits(instance, bounds):
    t = instance.arrivals
    pre = instance.pre_delays
    eps = bounds.eps
    return [i for i in range(instance.size - 1) if t[i + 1] - t[i] > pre[i] + eps]


def oracle_energy(instance: ProblemInstance, cost: CostModel, end_time: float,
                  config: OracleConfig | None = None):
    """Minimize total cost over departure times with the last fixed at ``end_time``.

    Returns (schedule, cost). Instances with forced idle are split at the idle
    points; earlier segments end at their own last deadline, and the returned
    schedule then holds correct durations (its cumulative departures are not
    absolute times across an idle gap).
    """
    cfg = config or OracleConfig()
    b = derive_bounds(instance)
    eps = equality_tolerance(max(end_time, b.end_time))
    if end_time <= instance.arrivals[-1]:
        raise InfeasibleProblem("end time must lie after the last arrival")
    use_grid = cfg.mode == "grid" or (cfg.mode == "auto" and instance.size <= 4)
    if use_grid and instance.size > 4:
        raise ValueError("grid mode is limited to instances with at most 4 packets")

    cuts = _forced_splits(instance, b)
    starts = [0] + [i + 1 for i in cuts]
    stops = [i + 1 for i in cuts] + [instance.size]
    durs: list[float] = []
    total = 0.0
    for a, z in zip(starts, stops):
        seg_end = end_time if z == instance.size else b.departure_deadlines[z - 1]
        seg_durs, seg_cost = _solve_segment(
            cost.evaluate,
            instance.arrivals[a],
            seg_end,
            instance.arrivals[a:z],
            b.departure_deadlines[a:z],
            b.departure_floors[a:z],
            cfg,
            use_grid,
            eps,
        )
        durs.extend(seg_durs)
        total += seg_cost
    return Schedule(durs), total


def oracle_time(budgeted, config: OracleConfig | None = None):
    """Smallest completion time whose minimal energy fits the budget.

    Bisects the candidate end time between the latest floor/last arrival and
    the end time, to a width of 1e-9 * t_E.
    """
    cfg = config or OracleConfig()
    inst = budgeted.instance
    w = budgeted.cost
    w_max = budgeted.w_max
    b = derive_bounds(inst)
    if _forced_splits(inst, b):
        raise ValueError("completion-time oracle requires an instance without forced idle")
    slack = 1e-12 * (1.0 + w_max)

    def attempt(t_end):
        try:
            sched, c = oracle_energy(inst, w, t_end, cfg)
        except InfeasibleProblem:
            return None
        if c <= w_max + slack:
            return sched, c
        return None

    t_e = b.end_time
    top = attempt(t_e)
    if top is None:
        _, e_min = oracle_energy(inst, w, t_e, cfg)
        raise InsufficientBudget(required=e_min)
    lo = max([inst.arrivals[-1]] + [f for f in b.departure_floors if not math.isinf(f)])
    bottom = attempt(lo) if lo > inst.arrivals[-1] else None
    if bottom is not None:
        return bottom[0], lo
    hi = t_e
    best = top
    width = 1e-9 * t_e
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        got = attempt(mid)
        if got is None:
            lo = mid
        else:
            hi = mid
            best = got
    return best[0], hi
