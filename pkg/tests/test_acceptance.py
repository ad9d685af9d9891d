"""Acceptance criteria A1 to A9.

Each test is tagged with its criterion id; the terminal summary prints one
PASS/FAIL line per criterion with the measured numbers.  Run just these with
``pytest tests/test_acceptance.py``.
"""

import random
import time

import pytest

from specrepair import analysis, automata, counting, ltl
from specrepair.analysis import Relation
from specrepair.automata import DetAutomaton
from specrepair.fitness import STATUS_VALUES, Weights, sem_sim, status_score, syn_sim
from specrepair.harness import load_spec_file, run_ranking_study, vargha_delaney_a12
from specrepair.ltl import Spec
from specrepair.realizability import Backend, Verdict, builtin_bounded_realizability
from specrepair.search import GAConfig, run_ga, run_random_baseline, verify_repair

import oracles
from conftest import ROOT

P = ltl.parse
PHI = P("G (p -> X q)")
SEEDS = range(10)


def arbiter_files():
    return {name: load_spec_file(ROOT / "specs" / f"{name}.spec").spec
            for name in ("arbiter", "arbiter_fair", "arbiter_mutex")}


@pytest.mark.acceptance("A1")
def test_a1_worked_counting_example(criterion):
    counting._count_cached.cache_clear()
    t = time.perf_counter()
    n = counting.count_models_approx(PHI, 4, ("p", "q"))
    dt = time.perf_counter() - t
    criterion["detail"] = f"count={n} (want 108) in {dt:.3f}s (< 1s)"
    assert n == 108 and dt < 1.0


@pytest.mark.acceptance("A2")
def test_a2_exact_lasso_calibration(criterion):
    t = time.perf_counter()
    n = counting.count_lassos_exact(PHI, 4, ("p", "q"))
    dt = time.perf_counter() - t
    words = oracles.distinct_word_count(PHI, ("p", "q"), 4)
    criterion["detail"] = (f"(base, loop) pairs={n} (want 351) in {dt:.3f}s (< 10s); "
                           f"distinct-word convention gives {words}")
    assert n == 351 and dt < 10.0


@pytest.mark.acceptance("A3")
def test_a3_counting_soundness(criterion):
    rng = random.Random(2024)
    t = time.perf_counter()
    checked = mismatches = 0
    for _ in range(200):
        n_atoms = rng.randint(1, 2)
        n = rng.randint(1, 5)
        letters = 1 << n_atoms
        raw = DetAutomaton(tuple(f"a{i}" for i in range(n_atoms)),
                           [[rng.randrange(n) for _ in range(letters)] for _ in range(n)], 0,
                           frozenset(q for q in range(n) if rng.random() < 0.5))
        d = automata.minimize(raw)
        assert d.n_states <= 5
        k = rng.randint(1, 8)
        got = counting.count_prefixes(counting.build_transfer_matrix(d), k)
        checked += 1
        mismatches += got != oracles.enumerate_count_words(d, k)
    dt = time.perf_counter() - t
    criterion["detail"] = f"{checked} minimized DFAs, {mismatches} mismatches, {dt:.1f}s (< 60s)"
    assert mismatches == 0 and dt < 60.0


@pytest.mark.acceptance("A4")
def test_a4_ranking_preservation(criterion):
    t = time.perf_counter()
    sets = run_ranking_study(5, 20, ("p", "q"), (6, 8), random.Random(0))
    dt = time.perf_counter() - t
    good = sum(1 for s in sets if s.discrepancy <= 2)
    per_set = ", ".join(f"k={s.k}:{s.discrepancy} (rho {s.correlation:.2f})" for s in sets)
    criterion["detail"] = f"{good}/5 sets with <= 2 misplaced (need >= 4) [{per_set}] in {dt:.0f}s"
    assert all(not s.skipped for s in sets)
    assert good >= 4 and dt < 600.0


# -- end-to-end runs shared by A5, A6 and A7 -----------------------------------------


@pytest.fixture(scope="module")
def arbiter_runs():
    spec = arbiter_files()["arbiter"]
    ga, rnd = [], []
    t = time.perf_counter()
    for seed in SEEDS:
        cfg = GAConfig(seed=seed, budget_seconds=600.0, jobs=1)
        ga.append(run_ga(spec, cfg, Backend()))
        rnd.append(run_random_baseline(spec, cfg, Backend()))
    return ga, rnd, time.perf_counter() - t


@pytest.mark.slow
@pytest.mark.acceptance("A5")
def test_a5_end_to_end_repair(criterion, arbiter_runs):
    ga, _, elapsed = arbiter_runs
    files = arbiter_files()
    targets = [files["arbiter_fair"].implication(), files["arbiter_mutex"].implication()]
    successes = sum(1 for r in ga if r.repairs)
    named = set()
    for r in ga:
        for s in r.repair_specs():
            for name, target in zip(("fairness", "mutual exclusion"), targets):
                if name not in named and analysis.classify_relation(s.implication(), target) \
                        is Relation.EQUIVALENT:
                    named.add(name)
    within = all(r.stats["wallClockSeconds"] <= 600 and r.stats["individualsEvaluated"] <= 1000
                 for r in ga)
    criterion["detail"] = (f"{successes}/10 runs with a verified repair (need >= 8); "
                           f"named fixes found: {sorted(named) or 'none'}; "
                           f"repairs per run {[len(r.repairs) for r in ga]}; all runs {elapsed:.0f}s")
    assert successes >= 8 and named and within


@pytest.mark.slow
@pytest.mark.acceptance("A6")
def test_a6_ga_beats_random(criterion, arbiter_runs):
    ga, rnd, _ = arbiter_runs
    a = [len(r.repairs) for r in ga]
    b = [len(r.repairs) for r in rnd]
    for x, y in zip(ga, rnd):
        assert x.stats["individualsEvaluated"] == y.stats["individualsEvaluated"]
    ratio = sum(a) / max(1, sum(b))
    a12 = vargha_delaney_a12(a, b)
    criterion["detail"] = (f"GA {sum(a)} vs random {sum(b)} repairs (ratio {ratio:.1f}, need >= 2); "
                           f"A12 {a12:.2f} (need >= 0.8)")
    assert sum(a) >= 2 * sum(b) and a12 >= 0.8


@pytest.mark.slow
@pytest.mark.acceptance("A7")
def test_a7_soundness_gate(criterion, arbiter_runs):
    ga, rnd, _ = arbiter_runs
    total = failed = 0
    for report in ga + rnd:
        backend = Backend()  # fresh: no verdict shared with the run that found the repair
        for s in report.repair_specs():
            total += 1
            failed += not verify_repair(s, backend)
    criterion["detail"] = f"{total - failed}/{total} reported repairs re-verified (need all)"
    assert failed == 0 and total > 0


@pytest.mark.acceptance("A8")
def test_a8_fitness_properties(criterion):
    from test_fitness import STATUS_TABLE, random_spec

    t = time.perf_counter()
    table_ok = sum(1 for s, want in STATUS_TABLE
                   if status_score(s, Backend())[0] == want and want in STATUS_VALUES)
    rng = random.Random(21)
    bad_range = bad_identity = 0
    for _ in range(500):
        s, u = random_spec(rng), random_spec(rng)
        syn, sem = syn_sim(s, u), sem_sim(s, u, 8)
        bad_range += not (0.0 <= syn <= 1.0 and 0.0 <= sem <= 1.0)
        bad_identity += syn_sim(s, s) != 1.0
        if counting.count_models_approx(s.conjunction(), 8, s.variables) > 0:
            bad_identity += sem_sim(s, s, 8) != 1.0
    gp = Spec(("p",), (), (), (P("G p"),))
    gnp = Spec(("p",), (), (), (P("G !p"),))
    unsat_zero = sem_sim(gp, gnp, 8) == 0.0
    rejected = 0
    for bad in ((0.5, 0.5, 0.5), (1.2, -0.1, -0.1), (0.7, 0.1, 0.1)):
        try:
            Weights(*bad)
        except ValueError:
            rejected += 1
    dt = time.perf_counter() - t
    criterion["detail"] = (f"status table {table_ok}/{len(STATUS_TABLE)}; 500 pairs: "
                           f"{bad_range} out of range, {bad_identity} identity failures; "
                           f"unsat conjunction -> 0: {unsat_zero}; bad weights rejected {rejected}/3; "
                           f"{dt:.0f}s (< 300s)")
    assert table_ok == len(STATUS_TABLE) == 20
    assert bad_range == bad_identity == 0 and unsat_zero and rejected == 3 and dt < 300


@pytest.mark.acceptance("A9")
def test_a9_realizability_micro_suite(criterion):
    files = arbiter_files()
    xy = ("x",), ("y",)
    cases = [
        ("G (y <-> x)", Spec(*xy, (), (P("G (y <-> x)"),)), True, True),
        ("G (y <-> X x)", Spec(*xy, (), (P("G (y <-> X x)"),)), False, True),
        ("false", Spec(*xy, (), (ltl.F_,)), False, True),
        ("arbiter", files["arbiter"], False, False),
        ("arbiter + G F a", files["arbiter_fair"], True, False),
    ]
    t = time.perf_counter()
    wrong = []
    for name, s, want, with_oracle in cases:
        got = builtin_bounded_realizability(s, 6).status
        if got is not (Verdict.REALIZABLE if want else Verdict.UNREALIZABLE):
            wrong.append(f"{name}: {got.value}")
        if with_oracle and oracles.system_wins_horizon(s.implication(), s.inputs, s.outputs, 3) != want:
            wrong.append(f"{name}: strategy-tree oracle disagrees")
    dt = time.perf_counter() - t
    criterion["detail"] = (f"{len(cases) - len(wrong)}/{len(cases)} verdicts as expected, "
                           f"oracle-checked on the first three; {'; '.join(wrong) or 'no mismatches'} "
                           f"in {dt:.1f}s (< 120s)")
    assert not wrong and dt < 120
