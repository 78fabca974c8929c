"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
summary lines.
"""

import math
import random
import time

import pytest

from helpers import random_decomposable_instance, random_feasible_instance
from twosched.bench import (
    ALL_BASELINES,
    BaselineKind,
    FIG6_DEFAULTS,
    FIG7_DEFAULTS,
    GeneratorSpec,
    sweep_energy,
    sweep_time,
)
from twosched.core import (
    ProblemInstance,
    derive_bounds,
    inverse_cost,
    shannon_cost,
    total_cost,
    verify_schedule,
)
from twosched.energy_sched import (
    cost_independence_check,
    schedule_energy_two_sided,
    schedule_single_deadline,
)
from twosched.oracle import OracleConfig, oracle_energy, oracle_time
from twosched.structure import KIND_POST, KIND_PRE, KIND_REGULAR, check_lemma1, classify
from twosched.time_sched import BudgetedInstance, CaseTag, schedule_time_post, schedule_time_two_sided

INF = math.inf
W = inverse_cost()
DESCENT = OracleConfig(mode="descent")

FIG4 = ProblemInstance([0, 4, 10, 18], [24, 16, 34, 23], [37, 31, 8, 24], 41)


def _report(num, text):
    print(f"\nPASS criterion {num}: {text}")


def test_criterion_01_single_deadline_goldens():
    assert schedule_single_deadline([4, 8, 18, 2], 32).durations == (10, 10, 10, 2)
    assert schedule_single_deadline([8, 8, 8, 8], 32).durations == (8, 8, 8, 8)
    best = math.inf
    for _ in range(5):
        t0 = time.perf_counter()
        schedule_single_deadline([4, 8, 18, 2], 32)
        best = min(best, time.perf_counter() - t0)
    assert best < 1e-3
    _report(1, f"single-deadline goldens exact, runtime {best * 1e6:.0f} us < 1 ms")


def test_criterion_02_two_sided_golden():
    sched = schedule_energy_two_sided(FIG4)
    for got, want in zip(sched.durations, (10, 10, 13, 8)):
        assert abs(got - want) <= 1e-9
    st = classify(FIG4, sched)
    assert len(st.groups) == 1 and st.groups[0].kind == "H"
    assert [(sg.start, sg.stop, sg.kind) for sg in st.subgroups] == [
        (0, 2, KIND_PRE), (2, 3, KIND_POST), (3, 4, KIND_REGULAR)]
    for t3 in (5.0, 10.0, 15.0, 18.0):
        inst = ProblemInstance([0, 4, t3, 18], [24, 16, 34, 23], [37, 31, 8, 24], 41)
        variant = schedule_energy_two_sided(inst)
        assert all(abs(a - b) <= 1e-9 for a, b in zip(variant.durations, (10, 10, 13, 8)))
        _, oc = oracle_energy(inst, W, 41.0, DESCENT)
        assert abs(total_cost(variant, W) - oc) <= 1e-6 * (1 + oc)
    _report(2, "two-sided golden [10,10,13,8], structure H/pre/post/regular, "
               "third arrival immaterial (oracle-confirmed)")


def _corpus_1000():
    rng = random.Random(20230815)
    return [random_feasible_instance(rng, max_size=6) for _ in range(1000)]


def test_criterion_03_oracle_equivalence():
    t0 = time.perf_counter()
    worst = 0.0
    for inst in _corpus_1000():
        sched = schedule_energy_two_sided(inst)
        rep = verify_schedule(inst, sched, W)
        assert rep.violation_count() == 0
        _, oc = oracle_energy(inst, W, derive_bounds(inst).end_time, DESCENT)
        delta = abs(rep.total_cost - oc)
        assert delta <= 1e-6 * (1 + oc)
        worst = max(worst, delta / (1 + oc))
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    _report(3, f"1000 instances, worst relative cost gap {worst:.2e} <= 1e-6, "
               f"zero violations, {elapsed:.1f}s < 60s")


def test_criterion_04_cost_obliviousness():
    sh = shannon_cost(1.0)
    for inst in _corpus_1000():
        assert cost_independence_check(inst, W, sh)
    _report(4, "1000 instances: bitwise-identical schedules under 1/tau and shannon(1)")


def test_criterion_05_lemma_properties():
    rng = random.Random(71717)
    n_post = 0
    for k in range(10000):
        post_only = k % 2 == 1
        inst = random_feasible_instance(rng, max_size=8, post_only=post_only)
        sched = schedule_energy_two_sided(inst)
        assert check_lemma1(classify(inst, sched)) == []
        if post_only:
            n_post += 1
            tau = sched.durations
            for a, b in zip(tau, tau[1:]):
                assert a >= b - 1e-9 * max(1.0, a)
    _report(5, f"10^4 outputs: ordering relations clean; {n_post} post-only "
               "outputs non-increasing; zero failures")


def test_criterion_06_completion_time_goldens():
    r1 = schedule_time_post(BudgetedInstance(
        ProblemInstance([0, 3], [INF] * 2, [INF] * 2, 10), W, 1.0))
    assert abs(r1.t_c - 4.5) <= 1e-9
    r2 = schedule_time_post(BudgetedInstance(
        ProblemInstance([0, 3], [INF] * 2, [INF] * 2, 10), W, 0.5))
    assert abs(r2.t_c - 8.0) <= 1e-9
    r3 = schedule_time_post(BudgetedInstance(
        ProblemInstance([0], [INF], [4], 10), W, 1.0))
    assert abs(r3.t_c - 6.0) <= 1e-9
    assert r3.case_tag is CaseTag.CASE2B_I
    _report(6, "completion-time goldens T_c = 4.5 / 8 / 6 (case 2b-i) within 1e-9")


def test_criterion_07_budget_saturation_and_oracle():
    rng = random.Random(5005)
    checked = 0
    worst_sat = 0.0
    worst_tc = 0.0
    for k in range(500):
        post_only = k % 2 == 0
        inst = random_feasible_instance(rng, max_size=5, post_only=post_only)
        e_min = total_cost(schedule_energy_two_sided(inst), W)
        w_max = e_min * (1.0 + rng.uniform(0.05, 3.0))
        bi = BudgetedInstance(inst, W, w_max)
        r = schedule_time_post(bi) if post_only else schedule_time_two_sided(bi)
        b = derive_bounds(inst)
        if r.t_c > b.departure_floors[-1] + b.eps:
            sat = abs(r.energy_used - w_max)
            assert sat <= 1e-9 * (1 + w_max)
            worst_sat = max(worst_sat, sat / (1 + w_max))
            if post_only:
                tau = r.schedule.durations
                for a, x in zip(tau, tau[1:]):
                    assert a >= x - 1e-9 * max(1.0, a)
        _, t_oracle = oracle_time(bi, DESCENT)
        delta = abs(r.t_c - t_oracle)
        assert delta <= 1e-6 * b.end_time
        worst_tc = max(worst_tc, delta / b.end_time)
        checked += 1
    _report(7, f"{checked} budgeted instances: saturation gap {worst_sat:.2e} <= 1e-9, "
               f"T_c vs oracle {worst_tc:.2e} <= 1e-6, post-only monotone")


def test_criterion_08_sweep_properties():
    t0 = time.perf_counter()
    seed = 20240801
    spec6 = GeneratorSpec(size=FIG6_DEFAULTS["size"], t_r=FIG6_DEFAULTS["t_r"],
                          window=FIG6_DEFAULTS["windows"][0], seed=seed, trials=500)
    rep6 = sweep_energy(spec6, FIG6_DEFAULTS["windows"], W)
    for axis in FIG6_DEFAULTS["windows"]:
        ts = rep6.row(axis, BaselineKind.TWO_SIDED)
        feasible_trials = ts.trials - ts.infeasible_trials
        assert ts.successes_total == feasible_trials * spec6.size  # 100% success
        for kind in ALL_BASELINES:
            assert ts.metric_agg <= rep6.row(axis, kind).metric_agg + 1e-9

    spec7 = GeneratorSpec(size=FIG7_DEFAULTS["size"], t_r=FIG7_DEFAULTS["t_r"],
                          window=FIG7_DEFAULTS["window"], seed=seed, trials=500)
    rep7 = sweep_time(spec7, FIG7_DEFAULTS["budgets"], W)
    prev = None
    for axis in FIG7_DEFAULTS["budgets"]:
        ts = rep7.row(axis, BaselineKind.TWO_SIDED)
        feasible_trials = ts.trials - ts.infeasible_trials
        assert ts.successes_total == feasible_trials * spec7.size
        for kind in ALL_BASELINES:
            assert ts.metric_agg <= rep7.row(axis, kind).metric_agg + 1e-9
        if prev is not None:
            assert ts.metric_agg <= prev + 1e-9
        prev = ts.metric_agg
    elapsed = time.perf_counter() - t0
    assert elapsed < 300.0
    _report(8, f"fig6/fig7 sweeps at 500 trials: two-sided dominant everywhere, "
               f"100% success on feasible trials, fig7 non-increasing, {elapsed:.0f}s < 5min")


def test_criterion_09_decomposition_matches_oracle():
    rng = random.Random(60606)
    from twosched.feasibility import decompose

    worst = 0.0
    for _ in range(500):
        inst = random_decomposable_instance(rng, max_size=6)
        seg_cost = 0.0
        for seg in decompose(inst).segments:
            seg_cost += total_cost(schedule_energy_two_sided(seg.instance), W)
        _, oc = oracle_energy(inst, W, derive_bounds(inst).end_time, DESCENT)
        delta = abs(seg_cost - oc)
        assert delta <= 1e-6 * (1 + oc)
        worst = max(worst, delta / (1 + oc))
    _report(9, f"500 decomposable instances: segment-wise cost matches the "
               f"whole-instance oracle, worst gap {worst:.2e} <= 1e-6")


def test_criterion_10_determinism(tmp_path):
    from twosched.cli import main

    # library level: bitwise-identical reruns
    rng = random.Random(8888)
    for _ in range(20):
        inst = random_feasible_instance(rng, max_size=6)
        assert schedule_energy_two_sided(inst).durations == \
            schedule_energy_two_sided(inst).durations
        t_e = derive_bounds(inst).end_time
        s1, c1 = oracle_energy(inst, W, t_e, DESCENT)
        s2, c2 = oracle_energy(inst, W, t_e, DESCENT)
        assert s1.durations == s2.durations and c1 == c2
    # command level: identical bytes for repeated seeded runs
    args = ["sweep", "--figure", "fig7", "--trials", "10", "--seed", "42"]
    d1, d2 = tmp_path / "run1", tmp_path / "run2"
    assert main(args + ["--out-dir", str(d1)]) == 0
    assert main(args + ["--out-dir", str(d2)]) == 0
    for name in ("sweep_fig7.csv", "sweep_fig7.json"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()
    _report(10, "schedulers, oracle, and seeded sweep commands bitwise-reproducible")
