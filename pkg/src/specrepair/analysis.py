"""Satisfiability and implication checks on LTL formulas."""

from __future__ import annotations

import enum
from functools import lru_cache

from . import automata, ltl
from .ltl import Formula


@lru_cache(maxsize=50_000)
def is_sat(f: Formula) -> bool:
    """True iff some infinite word satisfies ``f`` (Büchi non-emptiness)."""
    b = automata.ltl_to_buchi(ltl.normalize_to_core(f))
    return not automata.is_empty(b)


def is_valid(f: Formula) -> bool:
    return not is_sat(ltl.neg(f))


class Relation(str, enum.Enum):
    EQUIVALENT = "equivalent"
    STRONGER = "aStrongerThanB"
    WEAKER = "aWeakerThanB"
    INCOMPARABLE = "incomparable"


def classify_relation(a: Formula, b: Formula) -> Relation:
    """Compare ``a`` and ``b`` by mutual implication."""
    a_implies_b = not is_sat(ltl.conj(a, ltl.neg(b)))
    b_implies_a = not is_sat(ltl.conj(b, ltl.neg(a)))
    if a_implies_b and b_implies_a:
        return Relation.EQUIVALENT
    if a_implies_b:
        return Relation.STRONGER
    if b_implies_a:
        return Relation.WEAKER
    return Relation.INCOMPARABLE
