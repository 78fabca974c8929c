import math
import random

import pytest

from helpers import random_feasible_instance
from twosched.core import (
    InsufficientBudget,
    ProblemInstance,
    derive_bounds,
    inverse_cost,
    shannon_cost,
    total_cost,
    verify_schedule,
)
from twosched.energy_sched import schedule_energy_two_sided
from twosched.time_sched import (
    BudgetedInstance,
    CaseTag,
    schedule_time_post,
    schedule_time_two_sided,
)

INF = math.inf
W = inverse_cost()


def budgeted(arrivals, pre, post, t_r, w_max, cost=W):
    return BudgetedInstance(ProblemInstance(arrivals, pre, post, t_r), cost, w_max)


class TestPostOnly:
    def test_single_packet_spends_budget(self):
        r = schedule_time_post(budgeted([0], [INF], [INF], 10, 0.5))
        assert r.schedule.durations == (2.0,)
        assert r.t_c == 2.0

    def test_no_merge(self):
        r = schedule_time_post(budgeted([0, 3], [INF] * 2, [INF] * 2, 10, 1.0))
        assert r.schedule.durations == (3.0, pytest.approx(1.5, abs=1e-12))
        assert r.t_c == pytest.approx(4.5, abs=1e-9)
        assert r.case_tag is CaseTag.CASE1

    def test_one_merge(self):
        # tail would be 6 > 3; merged equal split at w^-1(0.25) = 4
        r = schedule_time_post(budgeted([0, 3], [INF] * 2, [INF] * 2, 10, 0.5))
        assert r.schedule.durations == (4.0, 4.0)
        assert r.t_c == pytest.approx(8.0, abs=1e-9)
        assert r.case_tag is CaseTag.CASE1

    def test_floor_reachable_within_budget(self):
        r = schedule_time_post(budgeted([0], [INF], [4], 10, 1.0))
        assert r.t_c == pytest.approx(6.0, abs=1e-9)
        assert r.case_tag is CaseTag.CASE2B_I

    def test_rejects_bounded_pre(self):
        with pytest.raises(ValueError):
            schedule_time_post(budgeted([0], [5], [INF], 10, 1.0))

    def test_corollary1_nonincreasing(self):
        rng = random.Random(808)
        for _ in range(200):
            inst = random_feasible_instance(rng, max_size=5, post_only=True)
            e_min = total_cost(schedule_energy_two_sided(inst), W)
            bi = BudgetedInstance(inst, W, e_min * rng.uniform(1.05, 4.0))
            r = schedule_time_post(bi)
            fl_last = derive_bounds(inst).departure_floors[-1]
            if r.t_c > fl_last + derive_bounds(inst).eps:
                tau = r.schedule.durations
                for a, b in zip(tau, tau[1:]):
                    assert a >= b - 1e-9 * max(1.0, a)


class TestTwoSided:
    def test_pre_critical_batch(self):
        r = schedule_time_two_sided(budgeted([0, 2, 4], [10, 2, 20], [INF] * 3, 30, 2.0))
        assert r.schedule.durations == (2.0, 2.0, 1.0)
        assert r.t_c == pytest.approx(5.0, abs=1e-9)

    def test_budget_exactly_consumed(self):
        r = schedule_time_two_sided(budgeted([0, 2], [10, 2], [INF] * 2, 30, 1.0))
        assert r.schedule.durations == (2.0, 2.0)
        assert r.t_c == pytest.approx(4.0, abs=1e-9)
        assert r.energy_used == pytest.approx(1.0, abs=1e-12)

    def test_insufficient_budget_reports_requirement(self):
        with pytest.raises(InsufficientBudget) as info:
            schedule_time_two_sided(budgeted([0, 2], [10, 2], [INF] * 2, 30, 0.6))
        assert info.value.required == pytest.approx(1.0, rel=1e-12)

    def test_unbounded_pre_equals_post_only(self):
        rng = random.Random(9090)
        for _ in range(100):
            inst = random_feasible_instance(rng, max_size=5, post_only=True)
            e_min = total_cost(schedule_energy_two_sided(inst), W)
            bi = BudgetedInstance(inst, W, e_min * rng.uniform(1.05, 4.0))
            a = schedule_time_post(bi)
            b = schedule_time_two_sided(bi)
            assert a.schedule.durations == b.schedule.durations

    def test_rejects_forced_idle(self):
        with pytest.raises(ValueError, match="forced idle"):
            schedule_time_two_sided(budgeted([0, 10], [2, 5], [INF] * 2, 20, 5.0))

    def test_budget_monotone(self):
        rng = random.Random(112)
        for _ in range(50):
            inst = random_feasible_instance(rng, max_size=5)
            e_min = total_cost(schedule_energy_two_sided(inst), W)
            prev = None
            for mult in (1.02, 1.2, 1.5, 2.5, 6.0):
                r = schedule_time_two_sided(BudgetedInstance(inst, W, e_min * mult))
                if prev is not None:
                    assert r.t_c <= prev + 1e-9 * max(1.0, prev)
                prev = r.t_c

    def test_outputs_verify_and_respect_budget(self):
        rng = random.Random(3131)
        for _ in range(200):
            inst = random_feasible_instance(rng, max_size=6)
            e_min = total_cost(schedule_energy_two_sided(inst), W)
            w_max = e_min * rng.uniform(1.02, 3.0)
            r = schedule_time_two_sided(BudgetedInstance(inst, W, w_max))
            assert verify_schedule(inst, r.schedule, W, full_span=False).all_ok
            assert r.energy_used <= w_max + 1e-9 * (1 + w_max)
            assert r.t_c == r.schedule.departures[-1]

    def test_shannon_cost_path(self):
        sh = shannon_cost(1.0)
        inst = ProblemInstance([0, 2], [10, 6], [INF, INF], 30)
        e_min = total_cost(schedule_energy_two_sided(inst), sh)
        r = schedule_time_two_sided(BudgetedInstance(inst, sh, e_min * 1.4))
        assert r.energy_used == pytest.approx(e_min * 1.4, rel=1e-9)


def test_budgeted_instance_validates():
    with pytest.raises(ValueError):
        BudgetedInstance(ProblemInstance([0], [1], [1], 5), W, 0.0)
