import itertools
import random

import pytest
from hypothesis import given, strategies as st

from specrepair import ltl
from specrepair.ltl import Spec
from specrepair.harness import (SpecFileError, compare_repair_sets, format_spec, load_spec_file,
                                parse_spec_text, rank_correlation, ranking_discrepancy,
                                ranking_positions, run_ranking_study, save_spec_file,
                                vargha_delaney_a12)

P = ltl.parse


# -- spec files ----------------------------------------------------------------------


def test_arbiter_fixture(arbiter_path):
    sf = load_spec_file(arbiter_path)
    s = sf.spec
    assert (len(s.inputs), len(s.outputs)) == (3, 2)
    assert (len(s.assumptions), len(s.guarantees)) == (0, 3)
    assert sf.name == "arbiter" and sf.path == str(arbiter_path)


def test_comments_blank_lines_and_case():
    text = "# header\n\nname: demo\nINPUTS: x   # the request\nOUTPUTS: y\nGUARANTEE: G (x -> F y)\n"
    sf = parse_spec_text(text)
    assert sf.name == "demo" and sf.spec.guarantees == (P("G (x -> F y)"),)


def test_name_defaults_to_file_stem(tmp_path):
    p = tmp_path / "lift.spec"
    p.write_text("INPUTS: x\nOUTPUTS: y\nGUARANTEE: G y\n")
    assert load_spec_file(p).name == "lift"


@pytest.mark.parametrize("text,line,fragment", [
    ("INPUTS: x y\nOUTPUTS: y\nGUARANTEE: G y\n", 2, "both input and output"),
    ("INPUTS: x\nOUTPUTS: y\n", None, "at least one GUARANTEE"),
    ("INPUTS: x\nOUTPUTS: y\nGUARANTEE:\n", 3, "empty GUARANTEE"),
    ("INPUTS: x\nOUTPUTS: y\nGUARANTEE: G z\n", 3, "undeclared variable 'z'"),
    ("INPUTS: x\nOUTPUTS: y\nASSUMPTION: G F x\nGUARANTEE: G (y ->\n", 4, "syntax error"),
    ("INPUTS: x\nOUTPUTS: y\nWHATEVER: 1\n", 3, "expected one of"),
    ("INPUTS: x\nINPUTS: z\nOUTPUTS: y\nGUARANTEE: y\n", 2, "duplicate INPUTS"),
    ("INPUTS: x x\nOUTPUTS: y\nGUARANTEE: y\n", 1, "repeated variable"),
    ("INPUTS: X\nOUTPUTS: y\nGUARANTEE: y\n", 1, "invalid variable"),
])
def test_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(SpecFileError) as err:
        parse_spec_text(text, "f.spec")
    assert err.value.line == line
    assert fragment in str(err.value)
    if line is not None:
        assert str(err.value).startswith(f"f.spec:{line}:")


def test_assumptions_may_mention_outputs():
    # only the search operators restrict assumptions to inputs
    sf = parse_spec_text("INPUTS: x\nOUTPUTS: y\nASSUMPTION: G (y -> X x)\nGUARANTEE: y\n")
    assert sf.spec.assumptions == (P("G (y -> X x)"),)


def test_missing_file(tmp_path):
    with pytest.raises(SpecFileError):
        load_spec_file(tmp_path / "nope.spec")


def test_round_trip_fixtures(tmp_path, arbiter_path):
    for p in sorted(arbiter_path.parent.glob("*.spec")):
        s = load_spec_file(p).spec
        out = tmp_path / p.name
        save_spec_file(s, out)
        assert load_spec_file(out).spec == s


def test_round_trip_random_specs(tmp_path):
    rng = random.Random(9)
    for n in range(50):
        s = Spec(("x", "z"), ("y",),
                 tuple(ltl.random_formula(rng, ("x", "z"), rng.randint(1, 6)) for _ in range(rng.randint(0, 2))),
                 tuple(ltl.random_formula(rng, ("x", "z", "y"), rng.randint(1, 8)) for _ in range(rng.randint(1, 3))),
                 f"s{n}")
        assert parse_spec_text(format_spec(s)).spec == s


# -- repair-set comparison -----------------------------------------------------------


def one(text, inputs=("p",), outputs=()):
    return Spec(inputs, outputs, (), (P(text),))


def test_compare_identical():
    s = one("G p")
    out = compare_repair_sets([s], [s])
    assert (out.unique, out.equivalent) == (0, 1)


def test_compare_stronger():
    out = compare_repair_sets([one("G p")], [one("F p")])
    assert (out.unique, out.stronger, out.weaker) == (1, 1, 0)
    assert out.to_dict()["records"] == [{"ours": 0, "reference": 0, "relation": "aStrongerThanB"}]


def test_compare_disjoint():
    ours = [one("G p", ("p", "q")), one("F q", ("p", "q"))]
    ref = [one("p U q", ("p", "q"))]
    out = compare_repair_sets(ours, ref)
    assert out.unique == 2 and out.equivalent == 0


def test_compare_counts_partition_ours():
    rng = random.Random(4)
    forms = [ltl.random_formula(rng, ("p", "q"), rng.randint(1, 5)) for _ in range(12)]
    ours = [Spec(("p", "q"), (), (), (f,)) for f in forms[:7]]
    ref = [Spec(("p", "q"), (), (), (f,)) for f in forms[7:]] + ours[:2]
    out = compare_repair_sets(ours, ref)
    assert out.unique + out.equivalent == len(ours)
    assert out.equivalent >= 2
    assert len(out.records) == len(ours) * len(ref)


def test_compare_uses_the_implication_form(arbiter_path):
    fair = load_spec_file(arbiter_path.parent / "arbiter_fair.spec").spec
    variant = fair.replace(assumptions=(P("G F a && G F a"),))
    assert compare_repair_sets([variant], [fair]).equivalent == 1


# -- effect size ---------------------------------------------------------------------


def brute_a12(a, b):
    wins = sum(1.0 if x > y else 0.5 if x == y else 0.0 for x, y in itertools.product(a, b))
    return wins / (len(a) * len(b))


def test_a12_examples():
    assert vargha_delaney_a12([1, 1], [0, 0]) == 1.0
    assert vargha_delaney_a12([3, 1, 2], [3, 1, 2]) == 0.5
    # nine pairs: three losses, three ties, three wins
    assert vargha_delaney_a12([1, 2, 3], [2, 2, 2]) == pytest.approx(4.5 / 9)
    assert vargha_delaney_a12([1, 2, 3], [2, 2, 2]) == pytest.approx(brute_a12([1, 2, 3], [2, 2, 2]))
    with pytest.raises(ValueError):
        vargha_delaney_a12([], [1])


samples = st.lists(st.integers(-5, 5), min_size=1, max_size=12)


@given(samples, samples)
def test_a12_matches_pair_enumeration(a, b):
    assert vargha_delaney_a12(a, b) == pytest.approx(brute_a12(a, b))
    # the two directions always sum to one; ties contribute half to each
    assert vargha_delaney_a12(a, b) + vargha_delaney_a12(b, a) == pytest.approx(1.0)


# -- ranking study -------------------------------------------------------------------


def test_ranking_positions_are_stable():
    assert ranking_positions([5, 1, 5, 0]) == [2, 1, 3, 0]
    assert ranking_discrepancy([1, 2, 3], [10, 20, 30]) == 0
    assert ranking_discrepancy([1, 2, 3], [3, 2, 1]) == 2
    assert rank_correlation([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)
    assert rank_correlation([4, 4], [7, 7]) == 1.0


def test_constant_count_sets_have_no_discrepancy():
    sets = [[P("p"), P("q"), P("!p"), P("X q")], [P("true")] * 3]
    for r in run_ranking_study(formula_sets=sets, alphabet=("p", "q"), rng=random.Random(1)):
        assert r.discrepancy == 0 and r.correlation == 1.0


def test_duplicates_rank_adjacently():
    f = P("G (p -> X q)")
    (r,) = run_ranking_study(formula_sets=[[P("F p"), f, P("G p"), f]], alphabet=("p", "q"),
                             rng=random.Random(2))
    for counts in (r.exact, r.approx):
        pos = ranking_positions(counts)
        assert abs(pos[1] - pos[3]) == 1


def test_infeasible_formulas_are_skipped(monkeypatch):
    from specrepair import counting

    real = counting.count_lassos_exact

    def picky(f, k, alphabet):
        if f == P("G p"):
            raise counting.InfeasibleCount("too many")
        return real(f, k, alphabet)

    monkeypatch.setattr(counting, "count_lassos_exact", picky)
    (r,) = run_ranking_study(formula_sets=[[P("F p"), P("G p"), P("p")]], alphabet=("p",),
                             rng=random.Random(0))
    assert r.skipped == ["G (p)"] and len(r.exact) == len(r.approx) == 2


def test_small_study_completes():
    out = run_ranking_study(set_count=2, formulas_per_set=6, k_range=(3, 4), rng=random.Random(5))
    assert len(out) == 2
    for r in out:
        assert 3 <= r.k <= 4
        assert len(r.formulas) + len(r.skipped) == 6
        assert 0 <= r.discrepancy <= len(r.formulas)
        assert -1.0 <= r.correlation <= 1.0
