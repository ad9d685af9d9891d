"""Genetic operators on specifications: seeding, crossover and mutation."""

from __future__ import annotations

import random
from typing import Sequence

from . import analysis, ltl
from .ltl import Formula, Spec

PREFIX_OPS = (ltl.GLOBALLY, ltl.FINALLY, ltl.NEXT, ltl.NOT)
UNARY_OPS = (ltl.NOT, ltl.NEXT, ltl.FINALLY, ltl.GLOBALLY)
BINARY_OPS = (ltl.OR, ltl.AND, ltl.UNTIL, ltl.RELEASE, ltl.WEAK_UNTIL)
# operators allowed when a unary node grows a new atom on its left
GROW_OPS = (ltl.UNTIL, ltl.WEAK_UNTIL, ltl.AND, ltl.OR)


# -- initial population --------------------------------------------------------------


def assumption_patterns(inputs: Sequence[str]) -> list[Formula]:
    """Environment assumptions built from input variables only."""
    if not inputs:
        return []
    xs = [ltl.atom(x) for x in inputs]
    all_inputs = ltl.conj_all(xs)
    patterns = [ltl.always(ltl.eventually(x)) for x in xs]
    patterns.append(ltl.always(ltl.neg(all_inputs)))
    patterns.append(ltl.always(ltl.eventually(all_inputs)))
    return list(dict.fromkeys(patterns))


def seed_population(spec: Spec, size: int, rng: random.Random) -> list[Spec]:
    """``size`` specs: the original extended by one pattern assumption each,
    padded with copies of the original once the patterns run out."""
    patterns = [p for p in assumption_patterns(spec.inputs) if p not in spec.assumptions]
    rng.shuffle(patterns)
    seeds = []
    for p in patterns:
        if len(seeds) == size:
            break
        candidate = spec.replace(assumptions=spec.assumptions + (p,))
        if analysis.is_sat(candidate.assumption()):
            seeds.append(candidate)
    while len(seeds) < size:
        seeds.append(spec)
    return seeds


# -- crossover -----------------------------------------------------------------------


def replace_sub(f: Formula, g: Formula, rng: random.Random) -> Formula:
    """Replace a random sub-formula of ``f`` by a random sub-formula of ``g``."""
    phi = rng.choice(ltl.subformulas(f))
    psi = rng.choice(ltl.subformulas(g))
    return ltl.replace_occurrences(f, phi, psi)


def combine_sub(f: Formula, g: Formula, rng: random.Random, op: str | None = None) -> Formula:
    """Replace a sub-formula ``phi`` of ``f`` by ``phi op psi`` with ``psi`` from ``g``."""
    phi = rng.choice(ltl.subformulas(f))
    psi = rng.choice(ltl.subformulas(g))
    op = op or rng.choice(BINARY_OPS)
    return ltl.replace_occurrences(f, phi, ltl.Formula(op, (phi, psi)))


def _cross(first: tuple, second: tuple, rng: random.Random) -> tuple:
    if not first or not second:
        return first
    out = []
    for a in first:
        b = rng.choice(second)
        choice = rng.randrange(4)
        if choice == 0:
            out.append(a)
        elif choice == 1:
            out.append(b)
        elif choice == 2:
            out.append(replace_sub(a, b, rng))
        else:
            out.append(combine_sub(a, b, rng))
    return tuple(dict.fromkeys(out))


def crossover(s1: Spec, s2: Spec, rng: random.Random) -> Spec:
    return s1.replace(assumptions=_cross(s1.assumptions, s2.assumptions, rng),
                      guarantees=_cross(s1.guarantees, s2.guarantees, rng))


# -- mutation ------------------------------------------------------------------------


def _other(options: Sequence[str], current: str, rng: random.Random) -> str:
    rest = [o for o in options if o != current]
    return rng.choice(rest)


class _Mutator:
    def __init__(self, atoms: Sequence[str], rate: float, rng: random.Random):
        self.atoms = list(atoms)
        self.rate = rate
        self.rng = rng

    def walk(self, f: Formula) -> Formula:
        """Visit every node; each one is mutated with probability ``rate``."""
        if self.rng.random() < self.rate:
            return self.here(f, self.walk)
        if not f.args:
            return f
        args = tuple(self.walk(a) for a in f.args)
        return f if args == f.args else ltl.Formula(f.op, args)

    def here(self, f: Formula, inner) -> Formula:
        """One application of the case grammar at the root of ``f``.

        ``inner`` mutates the operands (the recursive calls of the grammar).
        """
        rng = self.rng
        if f.is_atomic:
            options = ["literal", "prefix"]
            if f.op == ltl.ATOM and any(a != f.name for a in self.atoms):
                options.append("swap")
            choice = rng.choice(options)
            if choice == "literal":
                if f.op == ltl.TRUE:
                    return ltl.F_
                if f.op == ltl.FALSE:
                    return ltl.T
                return ltl.lit(rng.random() < 0.5)
            if choice == "swap":
                return ltl.atom(rng.choice([a for a in self.atoms if a != f.name]))
            return ltl.Formula(rng.choice(PREFIX_OPS), (f,))
        if f.op in UNARY_OPS:
            (child,) = f.args
            options = ["drop", "swap", "stack"]
            if self.atoms:
                options.append("grow")
            choice = rng.choice(options)
            if choice == "drop":
                return inner(child)
            if choice == "swap":
                return ltl.Formula(_other(UNARY_OPS, f.op, rng), (inner(child),))
            if choice == "stack":
                return ltl.Formula(rng.choice(UNARY_OPS), (ltl.Formula(f.op, (inner(child),)),))
            p = ltl.atom(rng.choice(self.atoms))
            wrapped = ltl.Formula(rng.choice(UNARY_OPS), (inner(child),))
            return ltl.Formula(rng.choice(GROW_OPS), (p, wrapped))
        left, right = f.args
        choice = rng.choice(["pick", "swap", "wrap"])
        if choice == "pick":
            return inner(rng.choice(f.args))
        if choice == "swap":
            return ltl.Formula(_other(BINARY_OPS, f.op, rng), (inner(left), inner(right)))
        body = ltl.Formula(rng.choice(BINARY_OPS), (inner(left), inner(right)))
        return ltl.Formula(rng.choice(UNARY_OPS), (body,))


def mutate_formula(f: Formula, atoms: Sequence[str], rng: random.Random,
                   rate: float | None = None) -> Formula:
    """Mutate ``f`` node by node (default rate ``1/size``); the result always differs."""
    if rate is None:
        rate = 1.0 / ltl.formula_size(f)
    m = _Mutator(atoms, rate, rng)
    out = m.walk(f)
    tries = 0
    while out == f and tries < 20:
        # no gene fired: mutate one node chosen uniformly, leaving its operands alone
        target = rng.choice(list(f.walk()))
        out = _replace_one(f, target, m.here(target, lambda g: g))
        tries += 1
    return out


def _replace_one(f: Formula, target: Formula, replacement: Formula) -> Formula:
    """Replace one occurrence of ``target`` (the first in pre-order)."""
    done = False

    def go(g):
        nonlocal done
        if done:
            return g
        if g == target:
            done = True
            return replacement
        if not g.args:
            return g
        args = tuple(go(a) for a in g.args)
        return g if args == g.args else ltl.Formula(g.op, args)

    return go(f)


def mutate_spec(spec: Spec, rng: random.Random, rate: float | None = None) -> Spec:
    """Replace one assumption or guarantee by a mutant of it.

    Assumptions and guarantees are picked with equal probability; atoms that
    a mutation introduces into an assumption are inputs only.
    """
    use_assumption = bool(spec.assumptions) and rng.random() < 0.5
    if use_assumption:
        i = rng.randrange(len(spec.assumptions))
        new = mutate_formula(spec.assumptions[i], spec.inputs, rng, rate)
        items = list(spec.assumptions)
        items[i] = new
        return spec.replace(assumptions=tuple(dict.fromkeys(items)))
    i = rng.randrange(len(spec.guarantees))
    new = mutate_formula(spec.guarantees[i], spec.variables, rng, rate)
    items = list(spec.guarantees)
    items[i] = new
    return spec.replace(guarantees=tuple(dict.fromkeys(items)))
