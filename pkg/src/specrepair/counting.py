"""Model counting: transfer-matrix prefix counts and exact lasso counts."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import automata, ltl
from .ltl import Formula


@dataclass
class TransferMatrix:
    """``matrix[i, j]`` counts the letters leading from state ``i`` to ``j``.

    Entries are Python integers (object arrays) so powers never overflow.
    """

    matrix: np.ndarray
    initial: np.ndarray
    final: np.ndarray

    def __post_init__(self):
        self.matrix = _as_object(self.matrix)
        self.initial = _as_object(self.initial).reshape(-1)
        self.final = _as_object(self.final).reshape(-1)
        n = self.matrix.shape[0]
        if self.matrix.shape != (n, n) or self.initial.shape != (n,) or self.final.shape != (n,):
            raise ValueError("inconsistent transfer matrix dimensions")

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


def _as_object(a) -> np.ndarray:
    arr = np.array(a, dtype=object)
    return np.vectorize(int, otypes=[object])(arr) if arr.size else arr


def build_transfer_matrix(d: automata.DetAutomaton, trim: bool = False) -> TransferMatrix:
    """Transfer matrix of a complete DFA.

    With ``trim`` the states that cannot reach a final state are dropped,
    which leaves the counts unchanged.
    """
    keep = list(range(d.n_states))
    if trim:
        pred = [set() for _ in range(d.n_states)]
        for q, row in enumerate(d.delta):
            for t in row:
                pred[t].add(q)
        alive = automata._reachable(d.final, pred)
        keep = [q for q in keep if q in alive]
    pos = {q: i for i, q in enumerate(keep)}
    n = len(keep)
    m = np.zeros((n, n), dtype=object)
    m[:] = 0
    for q in keep:
        for t in d.delta[q]:
            if t in pos:
                m[pos[q], pos[t]] += 1
    init = np.zeros(n, dtype=object)
    init[:] = 0
    if d.initial in pos:
        init[pos[d.initial]] = 1
    fin = np.zeros(n, dtype=object)
    fin[:] = 0
    for q in d.final:
        if q in pos:
            fin[pos[q]] = 1
    return TransferMatrix(m, init, fin)


def _identity(n: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=object)
    out[:] = 0
    for i in range(n):
        out[i, i] = 1
    return out


def matrix_power(t: TransferMatrix | np.ndarray, k: int) -> np.ndarray:
    """Exact ``T**k`` by repeated squaring."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    m = t.matrix if isinstance(t, TransferMatrix) else _as_object(t)
    result = _identity(m.shape[0])
    base = m
    while k:
        if k & 1:
            result = result.dot(base)
        k >>= 1
        if k:
            base = base.dot(base)
    return result


def count_prefixes(t: TransferMatrix, k: int) -> int:
    """``I * T**k * F``: accepted words of length exactly ``k``.

    Evaluated as ``k`` sparse vector-matrix products, which is cheaper than
    forming the power when only one entry of the product is needed.
    """
    if k < 1:
        raise ValueError("k must be positive")
    n = t.dimension
    if n == 0:
        return 0
    rows = [[(int(j), t.matrix[i, j]) for j in np.nonzero(t.matrix[i] != 0)[0]] for i in range(n)]
    vec = [int(x) for x in t.initial]
    for _ in range(k):
        nxt = [0] * n
        for i, x in enumerate(vec):
            if x:
                for j, c in rows[i]:
                    nxt[j] += x * c
        vec = nxt
    return sum(x for x, f in zip(vec, t.final) if f)


def dfa_for(f: Formula, alphabet: Sequence[str]) -> automata.DetAutomaton:
    """Minimal DFA for the finitized Büchi automaton of ``f``."""
    core = ltl.normalize_to_core(f)
    b = automata.ltl_to_buchi(core, alphabet)
    return automata.minimize(automata.determinize(automata.finitize(b)))


def count_models_approx(f: Formula, k: int, alphabet: Sequence[str] | None = None) -> int:
    """Number of length-``k`` prefixes accepted by the finitized automaton of ``f``."""
    if k < 1:
        raise ValueError("k must be positive")
    alphabet = tuple(sorted(f.atoms())) if alphabet is None else tuple(alphabet)
    return _count_cached(f, k, alphabet)


@lru_cache(maxsize=20_000)
def _count_cached(f: Formula, k: int, alphabet: tuple[str, ...]) -> int:
    return count_prefixes(build_transfer_matrix(dfa_for(f, alphabet)), k)


# -- exact lasso counting ----------------------------------------------------------------

MAX_LASSO_CELLS = 1 << 24


class InfeasibleCount(ValueError):
    """The exact enumeration would exceed its work budget."""


def count_lassos_exact(f: Formula, k: int, alphabet: Sequence[str] | None = None,
                       max_cells: int = MAX_LASSO_CELLS) -> int:
    """Number of (base, loop index) pairs of length ``k`` whose lasso satisfies ``f``."""
    if k < 1:
        raise ValueError("k must be positive")
    alphabet = tuple(sorted(f.atoms())) if alphabet is None else tuple(alphabet)
    missing = f.atoms() - set(alphabet)
    if missing:
        raise ValueError(f"atoms {sorted(missing)} not in alphabet")
    m = len(alphabet)
    n_bases = 1 << (m * k)
    if n_bases * k > max_cells:
        raise InfeasibleCount(f"2^{m * k} bases of length {k} exceed the enumeration budget")
    # bases[b, i] is the letter at position i of base number b
    codes = np.arange(n_bases, dtype=np.int64)
    shifts = np.arange(k, dtype=np.int64) * m
    bases = (codes[:, None] >> shifts[None, :]) & ((1 << m) - 1)
    atom_values = {a: ((bases >> i) & 1).astype(bool) for i, a in enumerate(alphabet)}
    total = 0
    for loop in range(k):
        succ = np.array([i + 1 if i + 1 < k else loop for i in range(k)])
        total += int(_evaluate_batch(f, atom_values, succ, n_bases)[:, 0].sum())
    return total


def _evaluate_batch(f: Formula, atom_values, succ: np.ndarray, n: int) -> np.ndarray:
    k = len(succ)
    memo: dict[Formula, np.ndarray] = {}

    def fix(guard, now, keep, least):
        x = np.full((n, k), not least)
        for _ in range(2 * k + 1):
            new = guard & (now | (keep & x[:, succ]))
            if np.array_equal(new, x):
                break
            x = new
        return x

    def ev(g: Formula) -> np.ndarray:
        if g in memo:
            return memo[g]
        op = g.op
        ones = np.ones((n, k), dtype=bool)
        if op == ltl.ATOM:
            out = atom_values[g.name]
        elif op == ltl.TRUE:
            out = ones
        elif op == ltl.FALSE:
            out = ~ones
        elif op == ltl.NOT:
            out = ~ev(g.args[0])
        elif op == ltl.NEXT:
            out = ev(g.args[0])[:, succ]
        elif op == ltl.AND:
            out = ev(g.args[0]) & ev(g.args[1])
        elif op == ltl.OR:
            out = ev(g.args[0]) | ev(g.args[1])
        elif op == ltl.IMPLIES:
            out = ~ev(g.args[0]) | ev(g.args[1])
        elif op == ltl.IFF:
            out = ev(g.args[0]) == ev(g.args[1])
        elif op == ltl.FINALLY:
            out = fix(ones, ev(g.args[0]), ones, True)
        elif op == ltl.GLOBALLY:
            out = fix(ev(g.args[0]), ~ones, ones, False)
        elif op == ltl.UNTIL:
            out = fix(ones, ev(g.args[1]), ev(g.args[0]), True)
        elif op == ltl.WEAK_UNTIL:
            out = fix(ones, ev(g.args[1]), ev(g.args[0]), False)
        else:
            out = fix(ev(g.args[1]), ev(g.args[0]), ones, False)
        memo[g] = out
        return out

    return ev(f)


def rank_by_count(formulas: Sequence[Formula], k: int, mode: str = "approx",
                  alphabet: Sequence[str] | None = None) -> list[int]:
    """Indices of ``formulas`` in ascending order of model count (stable)."""
    counts = counts_for(formulas, k, mode, alphabet)
    return sorted(range(len(formulas)), key=lambda i: counts[i])


def counts_for(formulas: Sequence[Formula], k: int, mode: str = "approx",
               alphabet: Sequence[str] | None = None) -> list[int]:
    if alphabet is None:
        alphabet = sorted(set().union(*(f.atoms() for f in formulas))) if formulas else ()
    alphabet = tuple(alphabet)
    if mode == "approx":
        return [count_models_approx(f, k, alphabet) for f in formulas]
    if mode == "exact":
        return [count_lassos_exact(f, k, alphabet) for f in formulas]
    raise ValueError(f"unknown counting mode {mode!r}")
