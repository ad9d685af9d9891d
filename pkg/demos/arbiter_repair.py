"""Repairing the two-client arbiter.

The arbiter must eventually grant each request but may grant nothing while
``a`` is low, so the environment can block it forever.  The genetic search
looks for nearby realizable variants; two natural fixes are an assumption
that ``a`` holds infinitely often, or mutual exclusion of the grants in place
of the third guarantee.

    python demos/arbiter_repair.py [seed] [max_individuals]
"""

import sys
from pathlib import Path

from specrepair import ltl
from specrepair.harness import compare_repair_sets, load_spec_file
from specrepair.realizability import Backend
from specrepair.search import GAConfig, run_ga, run_random_baseline

SPECS = Path(__file__).resolve().parent.parent / "specs"


def show(spec):
    lines = [f"  assume    {ltl.to_string(a)}" for a in spec.assumptions]
    lines += [f"  guarantee {ltl.to_string(g)}" for g in spec.guarantees]
    return "\n".join(lines)


def main(seed=0, max_individuals=400):
    arbiter = load_spec_file(SPECS / "arbiter.spec").spec
    print("original:\n" + show(arbiter))
    print("realizability:", Backend().check(arbiter))

    cfg = GAConfig(seed=seed, max_individuals=max_individuals, jobs=1)
    ga = run_ga(arbiter, cfg)
    rnd = run_random_baseline(arbiter, cfg)
    print(f"\ngenetic search: {len(ga.repairs)} verified repairs from "
          f"{ga.stats['individualsEvaluated']} individuals in {ga.stats['wallClockSeconds']}s")
    print(f"random mutants: {len(rnd.repairs)} verified repairs at the same budget")

    for entry, spec in list(zip(ga.repairs, ga.repair_specs()))[:5]:
        print(f"\n#{entry['rank']}  combined {entry['combined']:.3f}  "
              f"syn {entry['synSim']:.3f}  sem {entry['semSim']:.3f}")
        print(show(spec))
        print("  lineage:", " <- ".join(entry["provenanceChain"]))

    references = [load_spec_file(SPECS / name).spec for name in ("arbiter_fair.spec", "arbiter_mutex.spec")]
    summary = compare_repair_sets(ga.repair_specs(), references)
    print(f"\nagainst the two hand-written fixes: {summary.equivalent} equivalent, "
          f"{summary.unique} unique ({summary.weaker} weaker, {summary.stronger} stronger)")


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:3]))
