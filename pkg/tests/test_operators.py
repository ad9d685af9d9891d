import random

import pytest

from specrepair import analysis, ltl, operators
from specrepair.analysis import Relation
from specrepair.ltl import Spec

P = ltl.parse


class FirstChoice:
    """An rng stand-in that always takes the first option."""

    def random(self):
        return 0.99

    def choice(self, seq):
        return seq[0]

    def randrange(self, n):
        return 0

    def shuffle(self, seq):
        pass


def reachable(step, target, tries=3000, seed=0):
    rng = random.Random(seed)
    return any(step(rng) == target for _ in range(tries))


# -- seeding -------------------------------------------------------------------------


def test_seeds_contain_the_fairness_repair(arbiter):
    seeds = operators.seed_population(arbiter, 100, random.Random(0))
    assert len(seeds) == 100
    assert arbiter.replace(assumptions=(P("G F a"),)) in seeds
    for s in seeds:
        assert analysis.is_sat(s.assumption())
        assert s.guarantees == arbiter.guarantees
        assert all(f.atoms() <= set(arbiter.inputs) for f in s.assumptions)
    # patterns exhausted: the rest are copies of the original
    assert seeds.count(arbiter) == 100 - 5


def test_patterns_for_one_input():
    assert operators.assumption_patterns(["x"]) == [P("G F x"), P("G !x")]
    assert operators.assumption_patterns([]) == []


def test_seeding_without_inputs():
    s = Spec((), ("y",), (), (P("G y"),))
    assert operators.seed_population(s, 4, random.Random(1)) == [s] * 4


def test_seeding_discards_unsatisfiable_assumption_sets():
    s = Spec(("x",), ("y",), (P("G x"),), (P("G y"),))
    seeds = operators.seed_population(s, 5, random.Random(2))
    # G x && G !x is unsatisfiable, so that pattern never appears
    assert all(P("G !x") not in t.assumptions for t in seeds)


# -- crossover -----------------------------------------------------------------------


def test_crossover_identity_path(arbiter):
    assert operators.crossover(arbiter, arbiter, FirstChoice()) == arbiter


def test_combine_sub_at_root():
    assert operators.combine_sub(P("G p"), P("F q"), FirstChoice(), ltl.AND) == P("G p && F q")


def test_crossover_can_swap_grant(arbiter):
    target = P("G (r2 -> F g1)")
    assert reachable(lambda rng: target in operators.crossover(arbiter, arbiter, rng).guarantees, True)


def test_crossover_takes_from_both_parents():
    s1 = Spec(("x",), ("y",), (P("G F x"),), (P("G y"),))
    s2 = Spec(("x",), ("y",), (P("G !x"),), (P("F y"),))
    children = [operators.crossover(s1, s2, random.Random(i)) for i in range(200)]
    assert any(c.guarantees == (P("F y"),) for c in children)
    assert any(c.guarantees == (P("G y"),) for c in children)
    assert any(c.guarantees[0] not in (P("F y"), P("G y")) for c in children)
    # empty assumption lists skip assumption crossover
    bare = s1.replace(assumptions=())
    assert operators.crossover(bare, s2, random.Random(0)).assumptions == ()


# -- mutation ------------------------------------------------------------------------


def test_mutation_finally_to_next():
    f = P("G (r1 -> F g1)")
    atoms = ("r1", "r2", "a", "g1", "g2")
    assert reachable(lambda rng: operators.mutate_formula(f, atoms, rng), P("G (r1 -> X g1)"))


def test_mutation_chain_to_mutual_exclusion():
    atoms = ("r1", "r2", "a", "g1", "g2")
    g3 = P("G (!a -> (!g1 && !g2))")
    step1 = P("G (!false -> (!g1 && !g2))")
    step2 = P("G (!false -> (!g1 || !g2))")
    assert reachable(lambda rng: operators.mutate_formula(g3, atoms, rng), step1)
    assert reachable(lambda rng: operators.mutate_formula(step1, atoms, rng), step2)
    assert analysis.classify_relation(step2, P("G (!g1 || !g2)")) is Relation.EQUIVALENT


def test_mutation_always_changes_the_formula():
    rng = random.Random(4)
    for _ in range(300):
        f = ltl.random_formula(rng, ("p", "q"), rng.randint(1, 10), literals=True)
        assert operators.mutate_formula(f, ("p", "q"), rng) != f


def test_mutation_cases_for_each_node_kind():
    rng = random.Random(8)
    seen = {"literal": set(), "unary": set(), "binary": set()}
    m = operators._Mutator(("p", "q"), 1.0, rng)
    for _ in range(400):
        seen["literal"].add(m.here(P("p"), lambda g: g).op)
        seen["unary"].add(m.here(P("X p"), lambda g: g).op)
        seen["binary"].add(m.here(P("p U q"), lambda g: g).op)
    assert {ltl.TRUE, ltl.FALSE, ltl.ATOM, ltl.GLOBALLY, ltl.FINALLY, ltl.NEXT, ltl.NOT} <= seen["literal"]
    # drop yields the atom; swap/stack give unary nodes; growth gives binary ones
    assert {ltl.ATOM, ltl.NOT, ltl.FINALLY, ltl.GLOBALLY, ltl.UNTIL, ltl.AND} <= seen["unary"]
    assert {ltl.ATOM, ltl.OR, ltl.RELEASE, ltl.WEAK_UNTIL, ltl.NEXT} <= seen["binary"]


def test_mutation_rate_zero_still_mutates_once():
    f = P("G (p -> X q)")
    g = operators.mutate_formula(f, ("p", "q"), random.Random(0), rate=0.0)
    assert g != f


@pytest.mark.parametrize("seed", range(5))
def test_operator_closure_over_long_chains(seed, arbiter):
    rng = random.Random(seed)
    population = operators.seed_population(arbiter, 10, rng)
    allowed = set(arbiter.variables)
    for _ in range(200):
        if rng.random() < 0.3:
            child = operators.crossover(rng.choice(population), rng.choice(population), rng)
        else:
            child = operators.mutate_spec(rng.choice(population), rng)
        # construction validates atoms; check the partition rules explicitly too
        for f in child.assumptions:
            assert f.atoms() <= set(arbiter.inputs)
            assert ltl.parse(ltl.to_string(f)) == f
        for f in child.guarantees:
            assert f.atoms() <= allowed
        assert child.guarantees
        population[rng.randrange(len(population))] = child


def test_thousand_random_mutations_well_formed(arbiter):
    rng = random.Random(12)
    for _ in range(1000):
        s = operators.mutate_spec(arbiter, rng)
        changed = [f for f in s.assumptions + s.guarantees if f not in arbiter.guarantees]
        assert len(changed) <= 1
        for f in s.assumptions + s.guarantees:
            assert ltl.parse(ltl.to_string(f), arbiter.variables) == f
