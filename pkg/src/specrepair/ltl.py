"""LTL formulas: abstract syntax, parsing, printing and lasso semantics.

Formulas are immutable trees.  Operators are identified by the token used in
the concrete syntax, so ``Formula("G", (p,))`` prints as ``G (p)``.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

ATOM = "ap"
TRUE = "true"
FALSE = "false"
NOT, NEXT, FINALLY, GLOBALLY = "!", "X", "F", "G"
AND, OR, IMPLIES, IFF = "&&", "||", "->", "<->"
UNTIL, WEAK_UNTIL, RELEASE = "U", "W", "R"

UNARY_OPS = (NOT, NEXT, FINALLY, GLOBALLY)
BINARY_OPS = (AND, OR, IMPLIES, IFF, UNTIL, WEAK_UNTIL, RELEASE)
TEMPORAL_BINARY = (UNTIL, WEAK_UNTIL, RELEASE)
CORE_OPS = frozenset({ATOM, TRUE, FALSE, NOT, AND, OR, NEXT, UNTIL, RELEASE})
RESERVED = frozenset({"X", "F", "G", "U", "W", "R", "true", "false"})

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class Formula:
    """An LTL formula node.  Equality and hashing are structural."""

    __slots__ = ("op", "args", "name", "_hash")

    def __init__(self, op: str, args: tuple = (), name: str | None = None):
        if op == ATOM:
            if not name or not _IDENT.match(name) or name in RESERVED:
                raise ValueError(f"invalid atom name {name!r}")
            if args:
                raise ValueError("atoms take no arguments")
        elif op in (TRUE, FALSE):
            if args:
                raise ValueError("literals take no arguments")
        elif op in UNARY_OPS:
            if len(args) != 1:
                raise ValueError(f"{op} expects one argument")
        elif op in BINARY_OPS:
            if len(args) != 2:
                raise ValueError(f"{op} expects two arguments")
        else:
            raise ValueError(f"unknown operator {op!r}")
        self.op = op
        self.args = tuple(args)
        self.name = name
        self._hash = hash((op, name, self.args))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Formula) or self._hash != other._hash:
            return False
        return self.op == other.op and self.name == other.name and self.args == other.args

    def __reduce__(self):
        return (Formula, (self.op, self.args, self.name))

    def __repr__(self) -> str:
        return f"Formula({to_string(self)!r})"

    def __str__(self) -> str:
        return to_string(self)

    @property
    def is_atomic(self) -> bool:
        return self.op in (ATOM, TRUE, FALSE)

    def atoms(self) -> frozenset[str]:
        return frozenset(f.name for f in self.walk() if f.op == ATOM)

    def walk(self) -> Iterator["Formula"]:
        """Pre-order traversal, duplicates included."""
        stack = [self]
        while stack:
            f = stack.pop()
            yield f
            stack.extend(reversed(f.args))


# -- constructors -----------------------------------------------------------

T = Formula(TRUE)
F_ = Formula(FALSE)


def atom(name: str) -> Formula:
    return Formula(ATOM, (), name)


def lit(value: bool) -> Formula:
    return T if value else F_


def neg(a: Formula) -> Formula:
    return Formula(NOT, (a,))


def nxt(a: Formula) -> Formula:
    return Formula(NEXT, (a,))


def eventually(a: Formula) -> Formula:
    return Formula(FINALLY, (a,))


def always(a: Formula) -> Formula:
    return Formula(GLOBALLY, (a,))


def conj(a: Formula, b: Formula) -> Formula:
    return Formula(AND, (a, b))


def disj(a: Formula, b: Formula) -> Formula:
    return Formula(OR, (a, b))


def implies(a: Formula, b: Formula) -> Formula:
    return Formula(IMPLIES, (a, b))


def iff(a: Formula, b: Formula) -> Formula:
    return Formula(IFF, (a, b))


def until(a: Formula, b: Formula) -> Formula:
    return Formula(UNTIL, (a, b))


def weak_until(a: Formula, b: Formula) -> Formula:
    return Formula(WEAK_UNTIL, (a, b))


def release(a: Formula, b: Formula) -> Formula:
    return Formula(RELEASE, (a, b))


def conj_all(formulas: Iterable[Formula]) -> Formula:
    """Right-nested conjunction; the empty conjunction is ``true``."""
    items = list(formulas)
    if not items:
        return T
    out = items[-1]
    for f in reversed(items[:-1]):
        out = conj(f, out)
    return out


def disj_all(formulas: Iterable[Formula]) -> Formula:
    items = list(formulas)
    if not items:
        return F_
    out = items[-1]
    for f in reversed(items[:-1]):
        out = disj(f, out)
    return out


# -- parsing ----------------------------------------------------------------


class LTLSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownAtomError(ValueError):
    def __init__(self, name: str):
        super().__init__(f"unknown atom {name!r}")
        self.atom = name


_TOKEN = re.compile(r"\s*(<->|->|&&|\|\||!|\(|\)|[A-Za-z_][A-Za-z0-9_]*)")

# binding strength, lowest first; right-associative levels marked True
_LEVELS = [((IFF,), False), ((IMPLIES,), True), ((OR,), False), ((AND,), False),
           ((UNTIL, WEAK_UNTIL, RELEASE), True)]


class _Parser:
    def __init__(self, text: str, alphabet):
        self.text = text
        self.alphabet = None if alphabet is None else frozenset(alphabet)
        self.tokens: list[tuple[str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                if text[pos:].strip() == "":
                    break
                bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
                raise LTLSyntaxError(f"unexpected character {text[bad]!r}", bad)
            self.tokens.append((m.group(1), m.start(1)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def position(self) -> int:
        return self.tokens[self.i][1] if self.i < len(self.tokens) else len(self.text)

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise LTLSyntaxError("unexpected end of input", len(self.text))
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.level(0)
        if self.peek() is not None:
            raise LTLSyntaxError(f"unexpected token {self.peek()!r}", self.position())
        return f

    def level(self, n: int) -> Formula:
        if n == len(_LEVELS):
            return self.unary()
        ops, right = _LEVELS[n]
        left = self.level(n + 1)
        if right:
            if self.peek() in ops:
                op = self.take()
                return Formula(op, (left, self.level(n)))
            return left
        while self.peek() in ops:
            op = self.take()
            left = Formula(op, (left, self.level(n + 1)))
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok in UNARY_OPS:
            self.take()
            return Formula(tok, (self.unary(),))
        if tok == "(":
            self.take()
            f = self.level(0)
            if self.peek() != ")":
                raise LTLSyntaxError("expected ')'", self.position())
            self.take()
            return f
        if tok in (TRUE, FALSE):
            self.take()
            return lit(tok == TRUE)
        if tok is not None and _IDENT.match(tok) and tok not in RESERVED:
            pos = self.position()
            self.take()
            if self.alphabet is not None and tok not in self.alphabet:
                err = UnknownAtomError(tok)
                err.position = pos
                raise err
            return atom(tok)
        if tok is None:
            raise LTLSyntaxError("unexpected end of input", len(self.text))
        raise LTLSyntaxError(f"unexpected token {tok!r}", self.position())


def parse(text: str, alphabet: Iterable[str] | None = None) -> Formula:
    """Parse LTL text.  With an ``alphabet``, atoms outside it are rejected."""
    return _Parser(text, alphabet).parse()


def to_string(f: Formula) -> str:
    if f.op == ATOM:
        return f.name
    if f.op in (TRUE, FALSE):
        return f.op
    if f.op in UNARY_OPS:
        return f"{f.op} ({to_string(f.args[0])})"
    left, right = f.args
    ls, rs = to_string(left), to_string(right)
    if left.op in BINARY_OPS:
        ls = f"({ls})"
    if right.op in BINARY_OPS:
        rs = f"({rs})"
    return f"{ls} {f.op} {rs}"


# -- sub-formula machinery ----------------------------------------------------


def subformulas(f: Formula) -> list[Formula]:
    """Structurally distinct sub-trees of ``f`` in pre-order of first occurrence."""
    seen: dict[Formula, None] = {}
    for g in f.walk():
        if g not in seen:
            seen[g] = None
    return list(seen)


def formula_size(f: Formula) -> int:
    return sum(1 for _ in f.walk())


def replace_occurrences(f: Formula, target: Formula, replacement: Formula) -> Formula:
    """Replace every occurrence of ``target`` in ``f`` by ``replacement``."""
    if target not in set(f.walk()):
        raise LookupError(f"{target} is not a sub-formula of {f}")
    return _replace(f, target, replacement)


def _replace(f: Formula, target: Formula, replacement: Formula) -> Formula:
    if f == target:
        return replacement
    if not f.args:
        return f
    args = tuple(_replace(a, target, replacement) for a in f.args)
    if all(a is b for a, b in zip(args, f.args)):
        return f
    return Formula(f.op, args, f.name)


def normalize_to_core(f: Formula) -> Formula:
    """Rewrite into atoms, literals, !, &&, ||, X, U and R only."""
    if f.is_atomic:
        return f
    args = [normalize_to_core(a) for a in f.args]
    op = f.op
    if op == GLOBALLY:
        return release(F_, args[0])
    if op == FINALLY:
        return until(T, args[0])
    if op == WEAK_UNTIL:
        a, b = args
        return release(b, disj(a, b))
    if op == IMPLIES:
        return disj(neg(args[0]), args[1])
    if op == IFF:
        a, b = args
        return disj(conj(a, b), conj(neg(a), neg(b)))
    return Formula(op, tuple(args))


# -- lasso semantics -----------------------------------------------------------


@dataclass(frozen=True)
class LassoWord:
    """An ultimately periodic word ``base[:loop] (base[loop:])^omega``.

    Letters are valuations encoded as integers: bit ``i`` is the value of
    ``alphabet[i]``.
    """

    alphabet: tuple[str, ...]
    base: tuple[int, ...]
    loop: int

    def __post_init__(self):
        if not self.base:
            raise ValueError("lasso base must be nonempty")
        if not 0 <= self.loop < len(self.base):
            raise ValueError("loop index must lie inside the base")
        limit = 1 << len(self.alphabet)
        if any(not 0 <= v < limit for v in self.base):
            raise ValueError("valuation outside the alphabet")

    @classmethod
    def from_sets(cls, alphabet: Sequence[str], base: Sequence[Iterable[str]], loop: int):
        alphabet = tuple(alphabet)
        index = {a: i for i, a in enumerate(alphabet)}
        return cls(alphabet, tuple(encode_valuation(s, index) for s in base), loop)

    def successor(self, i: int) -> int:
        return i + 1 if i + 1 < len(self.base) else self.loop

    def letter_at(self, i: int) -> int:
        """Letter at any position of the infinite word."""
        k, l = len(self.base), self.loop
        if i < k:
            return self.base[i]
        return self.base[l + (i - l) % (k - l)]


def encode_valuation(true_atoms: Iterable[str], index: dict[str, int]) -> int:
    v = 0
    for a in true_atoms:
        v |= 1 << index[a]
    return v


def evaluate_on_lasso(f: Formula, w: LassoWord) -> bool:
    """Truth of ``f`` at position 0 of the infinite word described by ``w``."""
    missing = f.atoms() - set(w.alphabet)
    if missing:
        raise ValueError(f"atoms {sorted(missing)} not in the word's alphabet")
    index = {a: i for i, a in enumerate(w.alphabet)}
    k = len(w.base)
    succ = [w.successor(i) for i in range(k)]
    memo: dict[Formula, list[bool]] = {}

    def ev(g: Formula) -> list[bool]:
        if g in memo:
            return memo[g]
        op = g.op
        if op == ATOM:
            bit = 1 << index[g.name]
            out = [bool(v & bit) for v in w.base]
        elif op == TRUE:
            out = [True] * k
        elif op == FALSE:
            out = [False] * k
        elif op == NOT:
            out = [not x for x in ev(g.args[0])]
        elif op == NEXT:
            a = ev(g.args[0])
            out = [a[succ[i]] for i in range(k)]
        elif op == AND:
            a, b = ev(g.args[0]), ev(g.args[1])
            out = [x and y for x, y in zip(a, b)]
        elif op == OR:
            a, b = ev(g.args[0]), ev(g.args[1])
            out = [x or y for x, y in zip(a, b)]
        elif op == IMPLIES:
            a, b = ev(g.args[0]), ev(g.args[1])
            out = [(not x) or y for x, y in zip(a, b)]
        elif op == IFF:
            a, b = ev(g.args[0]), ev(g.args[1])
            out = [x == y for x, y in zip(a, b)]
        elif op == FINALLY:
            out = _fixpoint([True] * k, ev(g.args[0]), [True] * k, succ, least=True)
        elif op == GLOBALLY:
            out = _fixpoint(ev(g.args[0]), [False] * k, [True] * k, succ, least=False)
        elif op == UNTIL:
            out = _fixpoint([True] * k, ev(g.args[1]), ev(g.args[0]), succ, least=True)
        elif op == WEAK_UNTIL:
            out = _fixpoint([True] * k, ev(g.args[1]), ev(g.args[0]), succ, least=False)
        else:  # RELEASE: b and (a or next)
            out = _fixpoint(ev(g.args[1]), ev(g.args[0]), [True] * k, succ, least=False)
        memo[g] = out
        return out

    return ev(f)[0]


def _fixpoint(guard, now, keep, succ, least):
    """Solve ``x[i] = guard[i] and (now[i] or (keep[i] and x[succ[i]]))``.

    Until-like operators take the least solution, release-like the greatest.
    Iteration stops after the values stabilise (at most ``2k`` sweeps).
    """
    k = len(succ)
    x = [not least] * k
    for _ in range(2 * k + 1):
        new = [guard[i] and (now[i] or (keep[i] and x[succ[i]])) for i in range(k)]
        if new == x:
            break
        x = new
    return x


# -- specifications ------------------------------------------------------------


@dataclass(frozen=True)
class Spec:
    """Assume-guarantee specification ``(/\\ assumptions) -> (/\\ guarantees)``."""

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    assumptions: tuple[Formula, ...]
    guarantees: tuple[Formula, ...]
    name: str = field(default="spec", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "assumptions", tuple(self.assumptions))
        object.__setattr__(self, "guarantees", tuple(self.guarantees))
        overlap = set(self.inputs) & set(self.outputs)
        if overlap:
            raise ValueError(f"variables both input and output: {sorted(overlap)}")
        if not self.guarantees:
            raise ValueError("a specification needs at least one guarantee")
        declared = set(self.variables)
        for f in self.assumptions + self.guarantees:
            extra = f.atoms() - declared
            if extra:
                raise ValueError(f"undeclared atoms {sorted(extra)} in {f}")

    @property
    def variables(self) -> tuple[str, ...]:
        return self.inputs + self.outputs

    def assumption(self) -> Formula:
        return conj_all(self.assumptions)

    def guarantee(self) -> Formula:
        return conj_all(self.guarantees)

    def conjunction(self) -> Formula:
        return conj_all(self.assumptions + self.guarantees)

    def implication(self) -> Formula:
        if not self.assumptions:
            return self.guarantee()
        return implies(self.assumption(), self.guarantee())

    def replace(self, assumptions=None, guarantees=None) -> "Spec":
        return Spec(self.inputs, self.outputs,
                    self.assumptions if assumptions is None else tuple(assumptions),
                    self.guarantees if guarantees is None else tuple(guarantees),
                    self.name)

    def key(self) -> str:
        """Canonical text used for deduplication and caching."""
        a = " ; ".join(to_string(f) for f in self.assumptions)
        g = " ; ".join(to_string(f) for f in self.guarantees)
        return f"{a} => {g}"


# -- random formulas -----------------------------------------------------------

_RANDOM_UNARY = (NOT, NEXT, FINALLY, GLOBALLY)
_RANDOM_BINARY = (AND, OR, IMPLIES, UNTIL, RELEASE, WEAK_UNTIL)


def random_formula(rng: random.Random, atoms: Sequence[str], size: int,
                   literals: bool = False) -> Formula:
    """A random formula with exactly ``size`` nodes over ``atoms``."""
    if size < 1:
        raise ValueError("size must be positive")
    if size == 1:
        if literals and rng.random() < 0.1:
            return lit(rng.random() < 0.5)
        return atom(rng.choice(list(atoms)))
    if size == 2 or rng.random() < 0.35:
        return Formula(rng.choice(_RANDOM_UNARY), (random_formula(rng, atoms, size - 1, literals),))
    left = rng.randint(1, size - 2)
    return Formula(rng.choice(_RANDOM_BINARY),
                   (random_formula(rng, atoms, left, literals),
                    random_formula(rng, atoms, size - 1 - left, literals)))
