"""Genetic search for realizable variants of an unrealizable specification."""

from __future__ import annotations

import json
import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Sequence

from . import analysis, ltl, operators
from .fitness import Counter, Fitness, Weights, evaluate_fitness
from .ltl import Spec
from .realizability import Backend, Verdict

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 100
    max_individuals: int = 1000
    budget_seconds: float = 7200.0
    bound: int = 20
    alpha: float = 0.7
    beta: float = 0.1
    gamma: float = 0.2
    crossover_fraction: float = 0.10
    mutation_rate: float | None = None  # None: 1/N per gene, N the formula size
    seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        Weights(self.alpha, self.beta, self.gamma)
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if self.max_individuals < 1 or self.budget_seconds <= 0 or self.bound < 1:
            raise ValueError("budgets and bound must be positive")
        if not 0.0 <= self.crossover_fraction <= 1.0:
            raise ValueError("crossover_fraction must lie in [0, 1]")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must lie in [0, 1]")

    @property
    def weights(self) -> Weights:
        return Weights(self.alpha, self.beta, self.gamma)


@dataclass
class Individual:
    index: int
    spec: Spec
    fitness: Fitness
    origin: str  # seed | crossover | mutation
    parents: tuple[int, ...] = ()

    def sort_key(self):
        f = self.fitness
        return (-f.combined, -f.sem, -f.syn, self.index)


def select_best(population: Sequence[Individual], size: int) -> list[Individual]:
    """Best ``size`` distinct individuals by fitness; ties go to higher
    semantic, then syntactic similarity, then earlier creation."""
    distinct: dict[str, Individual] = {}
    for ind in sorted(population, key=lambda i: i.index):
        distinct.setdefault(ind.spec.key(), ind)
    return sorted(distinct.values(), key=Individual.sort_key)[:size]


@dataclass
class RepairReport:
    kind: str
    config: dict
    original: Spec
    repairs: list[dict]
    stats: dict
    incomplete: bool = False

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "config": self.config,
            "originalSpec": spec_to_dict(self.original),
            "repairs": self.repairs,
            "stats": self.stats,
            "incomplete": self.incomplete,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"

    def repair_specs(self) -> list[Spec]:
        o = self.original
        return [Spec(o.inputs, o.outputs,
                     tuple(ltl.parse(a) for a in r["assumptions"]),
                     tuple(ltl.parse(g) for g in r["guarantees"]), o.name)
                for r in self.repairs]


def spec_to_dict(spec: Spec) -> dict:
    return {
        "name": spec.name,
        "inputs": list(spec.inputs),
        "outputs": list(spec.outputs),
        "assumptions": [ltl.to_string(f) for f in spec.assumptions],
        "guarantees": [ltl.to_string(f) for f in spec.guarantees],
    }


# -- evaluation ---------------------------------------------------------------------

_worker_state: dict = {}


def _worker_init(original, weights, backend, bound, counter):
    _worker_state.update(original=original, weights=weights, backend=backend,
                         bound=bound, counter=counter)


def _worker_eval(spec: Spec) -> tuple[Fitness, int]:
    s = _worker_state
    before = s["backend"].calls
    fit = evaluate_fitness(spec, s["original"], s["weights"], s["backend"], s["bound"], s["counter"])
    return fit, s["backend"].calls - before


class _Evaluator:
    """Fitness with a per-run cache; optionally fanned out to worker processes.

    Evaluation is a pure function of the candidate, so the pool never changes results.
    """

    def __init__(self, original: Spec, cfg: GAConfig, backend: Backend, counter: Counter | None):
        self.original = original
        self.cfg = cfg
        self.backend = backend
        self.counter = counter
        self.cache: dict[str, Fitness] = {}
        self.pool = None
        if cfg.jobs > 1:
            self.pool = ProcessPoolExecutor(
                cfg.jobs, initializer=_worker_init,
                initargs=(original, cfg.weights, backend, cfg.bound, counter))

    def evaluate(self, specs: Sequence[Spec]) -> list[Fitness]:
        todo = list(dict.fromkeys(s.key() for s in specs if s.key() not in self.cache))
        by_key = {s.key(): s for s in specs}
        if self.pool and len(todo) > 1:
            results = []
            for fit, calls in self.pool.map(_worker_eval, [by_key[k] for k in todo], chunksize=4):
                self.backend.calls += calls
                results.append(fit)
        else:
            results = (evaluate_fitness(by_key[k], self.original, self.cfg.weights, self.backend,
                                        self.cfg.bound, self.counter) for k in todo)
        for key, fit in zip(todo, results):
            self.cache[key] = fit
        return [self.cache[s.key()] for s in specs]

    def close(self):
        if self.pool:
            self.pool.shutdown(cancel_futures=True)


# -- reporting ------------------------------------------------------------------------


def _provenance(ind: Individual, everyone: dict[int, Individual]) -> list[str]:
    chain = []
    current = ind
    while True:
        chain.append(f"{current.origin}#{current.index}")
        if not current.parents:
            break
        current = everyone[current.parents[0]]
    return chain


def verify_repair(spec: Spec, backend: Backend) -> bool:
    """Independent re-check: satisfiable and realizable, bypassing caches."""
    if not analysis.is_sat(spec.conjunction()):
        return False
    return backend.check(spec, use_cache=False).status is Verdict.REALIZABLE


def _build_report(kind, original, cfg, everyone, backend, started, evaluated, incomplete,
                  extra_stats=None) -> RepairReport:
    candidates = select_best([i for i in everyone.values() if i.fitness.is_repair], len(everyone))
    repairs = []
    rejected = 0
    for ind in candidates:
        if not verify_repair(ind.spec, backend):
            rejected += 1
            continue
        f = ind.fitness
        repairs.append({
            "rank": len(repairs) + 1,
            "assumptions": [ltl.to_string(a) for a in ind.spec.assumptions],
            "guarantees": [ltl.to_string(g) for g in ind.spec.guarantees],
            "statusScore": f.status,
            "synSim": f.syn,
            "semSim": f.sem,
            "combined": f.combined,
            "provenanceChain": _provenance(ind, everyone),
        })
    stats = {
        "individualsEvaluated": evaluated,
        "wallClockSeconds": round(time.monotonic() - started, 3),
        "backendCalls": backend.calls,
        "rejectedOnReverification": rejected,
        "unknownVerdicts": sum(1 for i in everyone.values()
                               if i.fitness.verdict and i.fitness.verdict.startswith("unknown")),
    }
    stats.update(extra_stats or {})
    return RepairReport(kind, asdict(cfg), original, repairs, stats, incomplete)


# -- the genetic algorithm ------------------------------------------------------------


def run_ga(original: Spec, cfg: GAConfig | None = None, backend: Backend | None = None,
           counter: Counter | None = None) -> RepairReport:
    cfg = cfg or GAConfig()
    backend = backend or Backend()
    rng = random.Random(cfg.seed)
    started = time.monotonic()
    deadline = started + cfg.budget_seconds
    evaluator = _Evaluator(original, cfg, backend, counter)
    everyone: dict[int, Individual] = {}
    evaluated = 0
    generations = 0
    incomplete = False

    def admit(specs, origins):
        nonlocal evaluated
        specs = specs[: cfg.max_individuals - evaluated]
        fits = evaluator.evaluate(specs)
        out = []
        for spec, fit, (origin, parents) in zip(specs, fits, origins):
            ind = Individual(len(everyone), spec, fit, origin, parents)
            everyone[ind.index] = ind
            out.append(ind)
        evaluated += len(specs)
        return out

    try:
        if backend.check(original).status is Verdict.REALIZABLE:
            log.warning("the original specification is already realizable")
        seeds = operators.seed_population(original, cfg.population_size, rng)
        population = admit(seeds, [("seed", ())] * len(seeds))
        n_cross = round(cfg.crossover_fraction * cfg.population_size)
        while evaluated < cfg.max_individuals and time.monotonic() < deadline:
            generations += 1
            offspring, origins = [], []
            for _ in range(n_cross):
                p1, p2 = rng.choice(population), rng.choice(population)
                offspring.append(operators.crossover(p1.spec, p2.spec, rng))
                origins.append(("crossover", (p1.index, p2.index)))
            for parent in population:
                offspring.append(operators.mutate_spec(parent.spec, rng, cfg.mutation_rate))
                origins.append(("mutation", (parent.index,)))
            children = admit(offspring, origins)
            population = select_best(population + children, cfg.population_size)
    except KeyboardInterrupt:
        incomplete = True
    finally:
        evaluator.close()
    return _build_report("ga", original, cfg, everyone, backend, started, evaluated,
                         incomplete, {"generations": generations})


def run_random_baseline(original: Spec, cfg: GAConfig | None = None,
                        backend: Backend | None = None, counter: Counter | None = None) -> RepairReport:
    """Independent single mutants of the original, same budget and report."""
    cfg = cfg or GAConfig()
    backend = backend or Backend()
    rng = random.Random(cfg.seed)
    started = time.monotonic()
    deadline = started + cfg.budget_seconds
    evaluator = _Evaluator(original, cfg, backend, counter)
    everyone: dict[int, Individual] = {}
    incomplete = False
    try:
        while len(everyone) < cfg.max_individuals and time.monotonic() < deadline:
            batch = min(cfg.population_size, cfg.max_individuals - len(everyone))
            specs = [operators.mutate_spec(original, rng, cfg.mutation_rate) for _ in range(batch)]
            for spec, fit in zip(specs, evaluator.evaluate(specs)):
                everyone[len(everyone)] = Individual(len(everyone), spec, fit, "mutation")
    except KeyboardInterrupt:
        incomplete = True
    finally:
        evaluator.close()
    return _build_report("random", original, cfg, everyone, backend, started, len(everyone), incomplete)
