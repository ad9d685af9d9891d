"""Fitness of candidate repairs: status, syntactic and semantic similarity."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from . import analysis, counting, ltl
from .ltl import Formula, Spec
from .realizability import Backend, Verdict

Counter = Callable[[Formula, int, Sequence[str]], int]

STATUS_VALUES = (0.0, 0.1, 0.2, 0.5, 1.0)


@dataclass(frozen=True)
class Weights:
    alpha: float = 0.7
    beta: float = 0.1
    gamma: float = 0.2

    def __post_init__(self):
        for w in (self.alpha, self.beta, self.gamma):
            if not 0.0 <= w <= 1.0:
                raise ValueError("fitness weights must lie in [0, 1]")
        if abs(self.alpha + self.beta + self.gamma - 1.0) > 1e-9:
            raise ValueError("fitness weights must sum to 1")


@dataclass(frozen=True)
class Fitness:
    status: float
    syn: float
    sem: float
    combined: float
    verdict: str | None = None
    note: str | None = None

    @property
    def is_repair(self) -> bool:
        return self.status == 1.0


def status_score(spec: Spec, backend: Backend) -> tuple[float, str | None]:
    """Status tier of ``spec`` and the realizability verdict, if one was needed."""
    if spec.assumptions and not analysis.is_sat(spec.assumption()):
        return 0.0, None
    if not analysis.is_sat(spec.guarantee()):
        return 0.1, None
    if not analysis.is_sat(spec.conjunction()):
        return 0.2, None
    verdict = backend.check(spec)
    if verdict.status is Verdict.REALIZABLE:
        return 1.0, str(verdict)
    # unknown verdicts rank with the unrealizable tier
    return 0.5, str(verdict)


def spec_subformulas(spec: Spec) -> set[Formula]:
    out: set[Formula] = set()
    for f in spec.assumptions + spec.guarantees:
        out.update(ltl.subformulas(f))
    return out


def syn_sim(s: Spec, t: Spec) -> float:
    a, b = spec_subformulas(s), spec_subformulas(t)
    shared = len(a & b)
    return 0.5 * (shared / len(a) + shared / len(b))


def sem_sim(s: Spec, t: Spec, k: int = 20, counter: Counter | None = None) -> float:
    """Ratio of shared bounded models, averaged over both directions."""
    counter = counter or counting.count_models_approx
    alphabet = tuple(dict.fromkeys(s.variables + t.variables))
    n_s = counter(s.conjunction(), k, alphabet)
    n_t = counter(t.conjunction(), k, alphabet)
    if n_s == 0 or n_t == 0:
        return 0.0
    both = counter(ltl.conj(s.conjunction(), t.conjunction()), k, alphabet)
    if both == 0:
        return 0.0
    # prefix counts are not monotone under conjunction (a prefix may end in an
    # accepting state of the product but not of a factor), so cap each ratio
    return 0.5 * (min(1.0, both / n_s) + min(1.0, both / n_t))


def evaluate_fitness(spec: Spec, original: Spec, weights: Weights, backend: Backend,
                     k: int = 20, counter: Counter | None = None) -> Fitness:
    try:
        status, verdict = status_score(spec, backend)
        syn = syn_sim(original, spec)
        sem = sem_sim(original, spec, k, counter) if status > 0 else 0.0
    except Exception as exc:  # quarantine: never let one candidate abort a run
        return Fitness(0.0, 0.0, 0.0, 0.0, None, f"error: {exc}")
    combined = weights.alpha * status + weights.beta * syn + weights.gamma * sem
    return Fitness(status, syn, sem, combined, verdict)
