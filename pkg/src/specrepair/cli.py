"""Command-line entry point.

Exit codes: 0 success, 1 domain failure (e.g. no repair found), 2 usage
error, 3 backend or resource failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import secrets
import sys
from pathlib import Path

from . import analysis, automata, counting, harness, ltl
from .fitness import status_score
from .realizability import Backend, BackendConfig, Verdict
from .search import GAConfig, RepairReport, run_ga, run_random_baseline

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3

log = logging.getLogger("specrepair")


class UsageError(Exception):
    pass


def _alphabet(text: str | None, formula: ltl.Formula) -> tuple[str, ...]:
    if text is None:
        return tuple(sorted(formula.atoms()))
    names = tuple(a.strip() for a in text.split(",") if a.strip())
    if len(set(names)) != len(names):
        raise UsageError("repeated name in --alphabet")
    return names


def _formula(text: str | None) -> ltl.Formula:
    if text is None:
        raise UsageError("--formula is required")
    try:
        return ltl.parse(text)
    except ltl.LTLSyntaxError as exc:
        raise UsageError(f"cannot parse formula: {exc}") from None


def _spec(path: str | None) -> ltl.Spec:
    if path is None:
        raise UsageError("--spec is required")
    try:
        return harness.load_spec_file(path).spec
    except harness.SpecFileError as exc:
        raise UsageError(str(exc)) from None


def _backend(text: str) -> Backend:
    try:
        return Backend(BackendConfig.parse(text))
    except ValueError as exc:
        raise UsageError(f"--backend: {exc}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbelow(2**31)
        print(f"seed: {args.seed}", file=sys.stderr)
    return args.seed


# -- subcommands -------------------------------------------------------------------------


def cmd_count(args) -> int:
    f = _formula(args.formula)
    alphabet = _alphabet(args.alphabet, f)
    missing = f.atoms() - set(alphabet)
    if missing:
        raise UsageError(f"atoms {sorted(missing)} missing from --alphabet")
    if args.hoa:
        d = counting.dfa_for(f, alphabet)
        Path(args.hoa).write_text(automata.det_to_hoa(d), encoding="utf-8")
    if args.exact:
        n = counting.count_lassos_exact(f, args.bound, alphabet)
    else:
        n = counting.count_models_approx(f, args.bound, alphabet)
    print(n)
    return EXIT_OK


def cmd_check(args) -> int:
    if args.spec is None and args.formula is not None:
        f = _formula(args.formula)
        print("satisfiable" if analysis.is_sat(f) else "unsatisfiable")
        return EXIT_OK
    spec = _spec(args.spec)
    backend = _backend(args.backend)
    score, _ = status_score(spec, backend)
    verdict = backend.check(spec)
    result = {
        "spec": spec.name,
        "assumptionsSatisfiable": analysis.is_sat(spec.assumption()),
        "guaranteesSatisfiable": analysis.is_sat(spec.guarantee()),
        "conjunctionSatisfiable": analysis.is_sat(spec.conjunction()),
        "realizability": str(verdict),
        "statusScore": score,
    }
    _emit(json.dumps(result, indent=2) + "\n", args.out)
    return EXIT_OK if verdict.definite else EXIT_RESOURCE


def _ga_config(args) -> GAConfig:
    try:
        return GAConfig(population_size=args.population, max_individuals=args.max_individuals,
                        budget_seconds=args.budget_seconds, bound=args.bound, alpha=args.alpha,
                        beta=args.beta, gamma=args.gamma, seed=_seed(args), jobs=args.jobs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _run_search(args, runner) -> int:
    spec = _spec(args.spec)
    cfg = _ga_config(args)
    backend = _backend(args.backend)
    report: RepairReport = runner(spec, cfg, backend)
    _emit(report.to_json(), args.out)
    n = len(report.repairs)
    print(f"{n} verified repair(s) from {report.stats['individualsEvaluated']} individuals"
          + (" (interrupted)" if report.incomplete else ""), file=sys.stderr)
    return EXIT_OK if n else EXIT_DOMAIN


def cmd_repair(args) -> int:
    return _run_search(args, run_ga)


def cmd_random_baseline(args) -> int:
    return _run_search(args, run_random_baseline)


def cmd_ranking_study(args) -> int:
    rng = random.Random(_seed(args))
    alphabet = tuple(a.strip() for a in (args.alphabet or "p,q").split(",") if a.strip())
    if not alphabet:
        raise UsageError("--alphabet must name at least one atom")
    if not 1 <= args.k_min <= args.k_max:
        raise UsageError("need 1 <= --k-min <= --k-max")
    sets = harness.run_ranking_study(args.sets, args.formulas, alphabet,
                                     (args.k_min, args.k_max), rng)
    result = {"seed": args.seed, "alphabet": list(alphabet),
              "sets": [s.to_dict() for s in sets]}
    _emit(json.dumps(result, indent=2) + "\n", args.out)
    for s in sets:
        print(f"set {s.index}: k={s.k} discrepancy={s.discrepancy} rho={s.correlation:.3f}",
              file=sys.stderr)
    return EXIT_OK


def _load_repairs(path: str) -> list[ltl.Spec]:
    """Specs from a spec file or from the repairs of a JSON report."""
    if path.endswith(".json"):
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
            o = data["originalSpec"]
            return [ltl.Spec(tuple(o["inputs"]), tuple(o["outputs"]),
                             tuple(ltl.parse(a) for a in r["assumptions"]),
                             tuple(ltl.parse(g) for g in r["guarantees"]), o["name"])
                    for r in data["repairs"]]
        except (OSError, KeyError, ValueError) as exc:
            raise UsageError(f"cannot read report {path}: {exc}") from None
    return [_spec(path)]


def cmd_compare(args) -> int:
    if not args.ours or not args.reference:
        raise UsageError("compare needs --ours and --reference")
    ours = [s for p in args.ours for s in _load_repairs(p)]
    reference = [s for p in args.reference for s in _load_repairs(p)]
    summary = harness.compare_repair_sets(ours, reference)
    _emit(json.dumps(summary.to_dict(), indent=2) + "\n", args.out)
    return EXIT_OK


# -- argument parsing --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    d = GAConfig()
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", help="log progress to stderr")
    common.add_argument("--out", metavar="PATH", help="write the result here instead of stdout")

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--spec", metavar="PATH", required=True)
    search.add_argument("--bound", type=int, default=d.bound, help="counting bound k")
    search.add_argument("--alpha", type=float, default=d.alpha)
    search.add_argument("--beta", type=float, default=d.beta)
    search.add_argument("--gamma", type=float, default=d.gamma)
    search.add_argument("--population", type=int, default=d.population_size)
    search.add_argument("--max-individuals", type=int, default=d.max_individuals)
    search.add_argument("--budget-seconds", type=int, default=int(d.budget_seconds))
    search.add_argument("--seed", type=int, help="rng seed (printed when generated)")
    search.add_argument("--backend", default="builtin:6", metavar="SPEC",
                        help='builtin[:MAX_BOUND] or external:"CMD {formula} {ins} {outs}"')
    search.add_argument("--jobs", type=int, default=os.cpu_count() or 1)

    p = argparse.ArgumentParser(prog="specrepair", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", parents=[common], help="bounded model count of a formula")
    c.add_argument("--formula", metavar="STR", required=True)
    c.add_argument("--alphabet", metavar="CSV")
    c.add_argument("--bound", type=int, default=d.bound)
    c.add_argument("--exact", action="store_true", help="count lassos exactly by enumeration")
    c.add_argument("--hoa", metavar="PATH", help="also export the counted automaton")
    c.set_defaults(run=cmd_count)

    k = sub.add_parser("check", parents=[common], help="satisfiability and realizability")
    k.add_argument("--spec", metavar="PATH")
    k.add_argument("--formula", metavar="STR")
    k.add_argument("--backend", default="builtin:6", metavar="SPEC")
    k.set_defaults(run=cmd_check)

    r = sub.add_parser("repair", parents=[common, search], help="genetic repair search")
    r.set_defaults(run=cmd_repair)
    b = sub.add_parser("random-baseline", parents=[common, search], help="random mutation baseline")
    b.set_defaults(run=cmd_random_baseline)

    s = sub.add_parser("ranking-study", parents=[common], help="approximate vs exact count rankings")
    s.add_argument("--seed", type=int)
    s.add_argument("--alphabet", metavar="CSV", default="p,q")
    s.add_argument("--sets", type=int, default=5)
    s.add_argument("--formulas", type=int, default=20)
    s.add_argument("--k-min", type=int, default=6)
    s.add_argument("--k-max", type=int, default=8)
    s.set_defaults(run=cmd_ranking_study)

    m = sub.add_parser("compare", parents=[common], help="classify repairs against references")
    m.add_argument("--ours", nargs="+", metavar="PATH", help="spec files or JSON reports")
    m.add_argument("--reference", nargs="+", metavar="PATH", help="spec files or JSON reports")
    m.set_defaults(run=cmd_compare)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        if getattr(args, "bound", 1) < 1:
            raise UsageError("--bound must be positive")
        return args.run(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (counting.InfeasibleCount, automata.AutomatonTooLarge, MemoryError) as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
