"""Explicit-state automata over valuations of a proposition alphabet.

The LTL translation is a tableau on obligation sets: a state is the set of
formulas that must hold from the next position on, and every outgoing edge is
one consistent way ("cover") of discharging the current obligations.  Until
formulas that are postponed by a cover make the generalized acceptance
condition; it is degeneralized into a state-based Büchi automaton with a
level counter.

Edge labels are cubes (conjunctions of literals) stored as two bitmasks,
``pos`` and ``neg``, over the automaton's alphabet.  Bit ``i`` of a letter is
the value of ``alphabet[i]``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from . import ltl
from .ltl import Formula

DEFAULT_STATE_CAP = 100_000


class AutomatonTooLarge(RuntimeError):
    """Raised when a construction exceeds its state budget."""


@dataclass(frozen=True)
class Edge:
    pos: int
    neg: int
    target: int

    def matches(self, letter: int) -> bool:
        return letter & self.pos == self.pos and not letter & self.neg


@dataclass
class NondetAutomaton:
    """Nondeterministic automaton with cube-labelled edges.

    ``kind`` is ``"buchi"`` (accepting states visited infinitely often) or
    ``"finite"`` (accepting states are final states).
    """

    alphabet: tuple[str, ...]
    edges: list[list[Edge]]
    initial: frozenset[int]
    accepting: frozenset[int]
    kind: str = "buchi"
    names: list[str] | None = None

    @property
    def n_states(self) -> int:
        return len(self.edges)

    def successors(self, state: int, letter: int) -> set[int]:
        return {e.target for e in self.edges[state] if e.matches(letter)}

    def successor_table(self) -> list[list[int]]:
        """``table[q][v]`` is the bitmask of successors of ``q`` on letter ``v``."""
        letters = 1 << len(self.alphabet)
        table = []
        for out in self.edges:
            row = [0] * letters
            for e in out:
                bit = 1 << e.target
                for v in _cube_letters(e.pos, e.neg, len(self.alphabet)):
                    row[v] |= bit
            table.append(row)
        return table

    def label(self, e: Edge) -> Formula:
        lits = []
        for i, name in enumerate(self.alphabet):
            if e.pos >> i & 1:
                lits.append(ltl.atom(name))
            elif e.neg >> i & 1:
                lits.append(ltl.neg(ltl.atom(name)))
        return ltl.conj_all(lits)

    def accepts_finite(self, word: Sequence[int]) -> bool:
        current = set(self.initial)
        for v in word:
            current = {t for q in current for t in self.successors(q, v)}
            if not current:
                return False
        return bool(current & self.accepting)


@dataclass
class DetAutomaton:
    """Complete deterministic finite automaton; ``delta[q][v]`` is the successor."""

    alphabet: tuple[str, ...]
    delta: list[list[int]]
    initial: int
    final: frozenset[int]
    minimal: bool = False

    @property
    def n_states(self) -> int:
        return len(self.delta)

    def accepts(self, word: Sequence[int]) -> bool:
        q = self.initial
        for v in word:
            q = self.delta[q][v]
        return q in self.final

    def canonical(self) -> tuple:
        """Renumber states in BFS order from the initial state."""
        order = {self.initial: 0}
        queue = deque([self.initial])
        while queue:
            q = queue.popleft()
            for t in self.delta[q]:
                if t not in order:
                    order[t] = len(order)
                    queue.append(t)
        rows = [None] * len(order)
        for q, i in order.items():
            rows[i] = tuple(order[t] for t in self.delta[q])
        final = frozenset(order[q] for q in self.final if q in order)
        return tuple(rows), final


def _cube_letters(pos: int, neg: int, width: int) -> list[int]:
    free = [i for i in range(width) if not (pos >> i & 1) and not (neg >> i & 1)]
    out = []
    for m in range(1 << len(free)):
        v = pos
        for j, i in enumerate(free):
            if m >> j & 1:
                v |= 1 << i
        out.append(v)
    return out


# -- negation normal form --------------------------------------------------------


def _nnf(f: Formula, negate: bool = False) -> Formula:
    """Push negations to atoms over the core operators, simplifying constants."""
    return _nnf_cached(f, negate)


@lru_cache(maxsize=100_000)
def _nnf_cached(f: Formula, negate: bool) -> Formula:
    op = f.op
    if op == ltl.ATOM:
        return ltl.neg(f) if negate else f
    if op == ltl.TRUE:
        return ltl.F_ if negate else ltl.T
    if op == ltl.FALSE:
        return ltl.T if negate else ltl.F_
    if op == ltl.NOT:
        return _nnf_cached(f.args[0], not negate)
    if op == ltl.NEXT:
        a = _nnf_cached(f.args[0], negate)
        return a if a.op in (ltl.TRUE, ltl.FALSE) else ltl.nxt(a)
    if op in (ltl.AND, ltl.OR):
        a = _nnf_cached(f.args[0], negate)
        b = _nnf_cached(f.args[1], negate)
        is_and = (op == ltl.AND) != negate
        return _mk_and(a, b) if is_and else _mk_or(a, b)
    if op in (ltl.UNTIL, ltl.RELEASE):
        a = _nnf_cached(f.args[0], negate)
        b = _nnf_cached(f.args[1], negate)
        is_until = (op == ltl.UNTIL) != negate
        return _mk_until(a, b) if is_until else _mk_release(a, b)
    # sugar is removed before reaching here, but stay total
    return _nnf_cached(ltl.normalize_to_core(f), negate)


def _mk_and(a, b):
    if a.op == ltl.FALSE or b.op == ltl.FALSE:
        return ltl.F_
    if a.op == ltl.TRUE:
        return b
    if b.op == ltl.TRUE or a == b:
        return a
    return ltl.conj(a, b)


def _mk_or(a, b):
    if a.op == ltl.TRUE or b.op == ltl.TRUE:
        return ltl.T
    if a.op == ltl.FALSE:
        return b
    if b.op == ltl.FALSE or a == b:
        return a
    return ltl.disj(a, b)


def _mk_until(a, b):
    if b.op in (ltl.TRUE, ltl.FALSE) or a.op == ltl.FALSE:
        return b
    return ltl.until(a, b)


def _mk_release(a, b):
    if b.op in (ltl.TRUE, ltl.FALSE) or a.op == ltl.TRUE:
        return b
    return ltl.release(a, b)


# -- tableau -----------------------------------------------------------------------

# A cover is one int packing a cube, the postponed untils and the obligations for
# the next position: bits [0, w) positive literals, [w, 2w) negative literals,
# [2w, 2w+u) postponed untils, then one bit per interned next-obligation.
# Cover c subsumes d (is at least as permissive) iff c & d == c.


def _prune(covers):
    """Drop duplicates and covers subsumed by a more permissive one."""
    covers = list(dict.fromkeys(covers))
    if len(covers) < 2:
        return covers
    covers.sort(key=int.bit_count)
    kept = []
    for c in covers:
        for k in kept:
            if k & c == k:
                break
        else:
            kept.append(c)
    return kept


class _Tableau:
    def __init__(self, alphabet: Sequence[str], untils: Sequence[Formula]):
        self.width = len(alphabet)
        self.bit = {a: i for i, a in enumerate(alphabet)}
        self.lit_mask = (1 << self.width) - 1
        self.until_shift = 2 * self.width
        self.until_bit = {u: 1 << (self.until_shift + i) for i, u in enumerate(untils)}
        self.next_shift = self.until_shift + len(untils)
        self.next_formulas: list[Formula] = []
        self.next_bit: dict[Formula, int] = {}
        self.memo: dict[Formula, list] = {}

    def _next(self, g: Formula) -> int:
        b = self.next_bit.get(g)
        if b is None:
            b = self.next_bit[g] = 1 << (self.next_shift + len(self.next_formulas))
            self.next_formulas.append(g)
        return b

    def product(self, xs, ys):
        w, m = self.width, self.lit_mask
        out = []
        for a in xs:
            for b in ys:
                c = a | b
                if c & (c >> w) & m:
                    continue
                out.append(c)
        return _prune(out)

    def covers(self, f: Formula) -> list:
        if f in self.memo:
            return self.memo[f]
        op = f.op
        if op == ltl.TRUE:
            out = [0]
        elif op == ltl.FALSE:
            out = []
        elif op == ltl.ATOM:
            out = [1 << self.bit[f.name]]
        elif op == ltl.NOT:
            out = [1 << (self.width + self.bit[f.args[0].name])]
        elif op == ltl.NEXT:
            out = [self._next(f.args[0])]
        elif op == ltl.AND:
            out = self.product(self.covers(f.args[0]), self.covers(f.args[1]))
        elif op == ltl.OR:
            out = _prune(self.covers(f.args[0]) + self.covers(f.args[1]))
        elif op == ltl.UNTIL:
            wait = [self._next(f) | self.until_bit[f]]
            out = _prune(self.covers(f.args[1]) + self.product(self.covers(f.args[0]), wait))
        elif op == ltl.RELEASE:
            now = self.product(self.covers(f.args[0]), self.covers(f.args[1]))
            wait = self.product(self.covers(f.args[1]), [self._next(f)])
            out = _prune(now + wait)
        else:
            raise ValueError(f"operator {op!r} is not in negation normal form")
        self.memo[f] = out
        return out

    def state_covers(self, state: frozenset) -> list:
        out = [0]
        for f in sorted(state, key=ltl.to_string):
            out = self.product(out, self.covers(f))
            if not out:
                break
        return out

    def unpack(self, c: int):
        """(pos, neg, postponed until mask, next obligations) of a cover."""
        m = self.lit_mask
        postponed = (c >> self.until_shift) & ((1 << (self.next_shift - self.until_shift)) - 1)
        rest = c >> self.next_shift
        nexts = []
        i = 0
        while rest:
            if rest & 1:
                nexts.append(self.next_formulas[i])
            rest >>= 1
            i += 1
        return c & m, (c >> self.width) & m, postponed, nexts


def ltl_to_buchi(f: Formula, alphabet: Sequence[str] | None = None,
                 max_states: int = DEFAULT_STATE_CAP) -> NondetAutomaton:
    """State-based Büchi automaton accepting exactly the models of ``f``.

    The result is trimmed: every state is reachable and lies on a path to an
    accepting cycle.  An unsatisfiable formula yields an automaton with no
    states.
    """
    alphabet = tuple(sorted(f.atoms())) if alphabet is None else tuple(alphabet)
    missing = f.atoms() - set(alphabet)
    if missing:
        raise ValueError(f"atoms {sorted(missing)} not in alphabet")
    root = _nnf(ltl.normalize_to_core(f))
    untils = sorted({g for g in root.walk() if g.op == ltl.UNTIL}, key=ltl.to_string)
    n_acc = len(untils)
    full = (1 << n_acc) - 1
    tab = _Tableau(alphabet, untils)

    def canon(s):
        return frozenset(g for g in s if g.op != ltl.TRUE)

    start = canon([root])
    if root.op == ltl.FALSE:
        return NondetAutomaton(alphabet, [], frozenset(), frozenset())

    def advance(level: int, marks: int) -> int:
        j = 0 if level == n_acc else level
        while j < n_acc and marks >> j & 1:
            j += 1
        return j

    index: dict[tuple, int] = {(start, 0): 0}
    order = [(start, 0)]
    edges: list[list[Edge]] = []
    i = 0
    while i < len(order):
        state, level = order[i]
        i += 1
        out = []
        for c in tab.state_covers(state):
            pos, neg, postponed, nexts = tab.unpack(c)
            if any(g.op == ltl.FALSE for g in nexts):
                continue
            key = (canon(nexts), advance(level, full & ~postponed))
            if key not in index:
                if len(index) >= max_states:
                    raise AutomatonTooLarge(f"more than {max_states} automaton states")
                index[key] = len(order)
                order.append(key)
            out.append(Edge(pos, neg, index[key]))
        edges.append(out)
    accepting = frozenset(q for q, (_, level) in enumerate(order) if level == n_acc)
    names = ["{" + ", ".join(sorted(ltl.to_string(g) for g in s)) + f"}}/{lv}" for s, lv in order]
    aut = NondetAutomaton(alphabet, edges, frozenset([0]), accepting, "buchi", names)
    return reduce_buchi(trim_buchi(aut))


# -- graph utilities -------------------------------------------------------------------


def _sccs(n: int, succ: Sequence[Iterable[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    out = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def _reachable(starts: Iterable[int], succ: Sequence[Iterable[int]]) -> set[int]:
    seen = set(starts)
    queue = deque(seen)
    while queue:
        q = queue.popleft()
        for t in succ[q]:
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return seen


def _restrict(aut: NondetAutomaton, keep: set[int], **changes) -> NondetAutomaton:
    order = sorted(keep)
    new = {q: i for i, q in enumerate(order)}
    edges = [[Edge(e.pos, e.neg, new[e.target]) for e in aut.edges[q] if e.target in new]
             for q in order]
    names = [aut.names[q] for q in order] if aut.names else None
    fields = dict(alphabet=aut.alphabet, edges=edges,
                  initial=frozenset(new[q] for q in aut.initial if q in new),
                  accepting=frozenset(new[q] for q in aut.accepting if q in new),
                  kind=aut.kind, names=names)
    fields.update(changes)
    return NondetAutomaton(**fields)


def accepting_cycle_states(aut: NondetAutomaton) -> set[int]:
    """States from which some accepting cycle is reachable."""
    succ = [[e.target for e in out] for out in aut.edges]
    good = set()
    for comp in _sccs(aut.n_states, succ):
        members = set(comp)
        cyclic = len(comp) > 1 or any(t == comp[0] for t in succ[comp[0]])
        if cyclic and members & aut.accepting:
            good |= members
    pred = [[] for _ in range(aut.n_states)]
    for q, ts in enumerate(succ):
        for t in ts:
            pred[t].append(q)
    return _reachable(good, pred)


def is_empty(aut: NondetAutomaton) -> bool:
    """Büchi emptiness via strongly connected components."""
    if not aut.initial:
        return True
    succ = [[e.target for e in out] for out in aut.edges]
    live = accepting_cycle_states(aut)
    return not (_reachable(aut.initial, succ) & live)


def trim_buchi(aut: NondetAutomaton) -> NondetAutomaton:
    succ = [[e.target for e in out] for out in aut.edges]
    keep = _reachable(aut.initial, succ) & accepting_cycle_states(aut)
    if not keep & aut.initial:
        return NondetAutomaton(aut.alphabet, [], frozenset(), frozenset(), aut.kind)
    return _restrict(aut, keep)


def reduce_buchi(aut: NondetAutomaton) -> NondetAutomaton:
    """Quotient by bisimulation and drop edges implied by a sibling edge."""
    if aut.n_states == 0:
        return aut
    block = [int(q in aut.accepting) for q in range(aut.n_states)]
    n_blocks = len(set(block))
    while True:
        sigs = {}
        new_block = []
        for q, out in enumerate(aut.edges):
            sig = (block[q], frozenset((e.pos, e.neg, block[e.target]) for e in out))
            new_block.append(sigs.setdefault(sig, len(sigs)))
        if len(sigs) == n_blocks:
            break
        block, n_blocks = new_block, len(sigs)
    # representatives in first-occurrence order keep numbering stable
    rep: dict[int, int] = {}
    for q in range(aut.n_states):
        rep.setdefault(block[q], q)
    order = sorted(rep.values())
    new_id = {block[q]: i for i, q in enumerate(order)}
    edges = []
    for q in order:
        labels = {}
        for e in aut.edges[q]:
            labels.setdefault(new_id[block[e.target]], set()).add((e.pos, e.neg))
        out = []
        for t in sorted(labels):
            cubes = sorted(labels[t], key=lambda c: bin(c[0]).count("1") + bin(c[1]).count("1"))
            kept = []
            for p, n in cubes:
                if not any(kp & p == kp and kn & n == kn for kp, kn in kept):
                    kept.append((p, n))
            out.extend(Edge(p, n, t) for p, n in kept)
        edges.append(out)
    names = [aut.names[q] for q in order] if aut.names else None
    return NondetAutomaton(aut.alphabet, edges,
                           frozenset(new_id[block[q]] for q in aut.initial),
                           frozenset(new_id[block[q]] for q in aut.accepting),
                           aut.kind, names)


# -- finite automata -------------------------------------------------------------------


def finitize(b: NondetAutomaton) -> NondetAutomaton:
    """Read accepting states as final states of a finite-word automaton.

    Transitions are untouched; states that are unreachable or cannot reach a
    final state are pruned.
    """
    if b.kind != "buchi":
        raise ValueError("finitize expects a Büchi automaton")
    succ = [[e.target for e in out] for out in b.edges]
    pred = [[] for _ in range(b.n_states)]
    for q, ts in enumerate(succ):
        for t in ts:
            pred[t].append(q)
    keep = _reachable(b.initial, succ) & _reachable(b.accepting, pred)
    if not keep & b.initial:
        return NondetAutomaton(b.alphabet, [], frozenset(), frozenset(), "finite")
    return _restrict(b, keep, kind="finite")


def determinize(n: NondetAutomaton, max_states: int = DEFAULT_STATE_CAP) -> DetAutomaton:
    """Subset construction over concrete letters, completed with a sink."""
    if n.kind != "finite":
        raise ValueError("determinize expects a finite automaton")
    letters = 1 << len(n.alphabet)
    table = n.successor_table()
    final_mask = 0
    for q in n.accepting:
        final_mask |= 1 << q
    start = 0
    for q in n.initial:
        start |= 1 << q
    index = {start: 0}
    subsets = [start]
    delta: list[list[int]] = []
    i = 0
    while i < len(subsets):
        s = subsets[i]
        i += 1
        members = [q for q in range(n.n_states) if s >> q & 1]
        row = []
        for v in range(letters):
            t = 0
            for q in members:
                t |= table[q][v]
            j = index.get(t)
            if j is None:
                if len(subsets) >= max_states:
                    raise AutomatonTooLarge(f"more than {max_states} subset states")
                j = index[t] = len(subsets)
                subsets.append(t)
            row.append(j)
        delta.append(row)
    final = frozenset(i for i, s in enumerate(subsets) if s & final_mask)
    return DetAutomaton(n.alphabet, delta, 0, final)


def minimize(d: DetAutomaton) -> DetAutomaton:
    """Hopcroft partition refinement on the reachable part of ``d``."""
    succ = [set(row) for row in d.delta]
    reach = sorted(_reachable([d.initial], succ))
    old_to_new = {q: i for i, q in enumerate(reach)}
    delta = [[old_to_new[t] for t in d.delta[q]] for q in reach]
    n = len(delta)
    letters = len(delta[0]) if delta else 0
    final = {old_to_new[q] for q in d.final if q in old_to_new}

    inverse = [[[] for _ in range(n)] for _ in range(letters)]
    for q in range(n):
        for v, t in enumerate(delta[q]):
            inverse[v][t].append(q)

    blocks = [b for b in (set(final), set(range(n)) - final) if b]
    block_of = [0] * n
    for i, b in enumerate(blocks):
        for q in b:
            block_of[q] = i
    work = {min(range(len(blocks)), key=lambda i: len(blocks[i]))} if len(blocks) == 2 else set()
    while work:
        splitter = frozenset(blocks[work.pop()])
        for v in range(letters):
            pre = set()
            for t in splitter:
                pre.update(inverse[v][t])
            if not pre:
                continue
            touched = {block_of[q] for q in pre}
            for b in touched:
                inside = blocks[b] & pre
                if len(inside) == len(blocks[b]):
                    continue
                outside = blocks[b] - inside
                blocks[b] = inside
                blocks.append(outside)
                nb = len(blocks) - 1
                for q in outside:
                    block_of[q] = nb
                if b in work:
                    work.add(nb)
                else:
                    work.add(b if len(inside) <= len(outside) else nb)

    # number blocks in BFS order from the initial state
    start = block_of[old_to_new[d.initial]]
    order = {start: 0}
    queue = deque([start])
    rep = {}
    for q in range(n):
        rep.setdefault(block_of[q], q)
    while queue:
        b = queue.popleft()
        for t in delta[rep[b]]:
            tb = block_of[t]
            if tb not in order:
                order[tb] = len(order)
                queue.append(tb)
    new_delta = [None] * len(order)
    for b, i in order.items():
        new_delta[i] = [order[block_of[t]] for t in delta[rep[b]]]
    new_final = frozenset(order[block_of[q]] for q in final)
    return DetAutomaton(d.alphabet, new_delta, 0, new_final, minimal=True)


def nfa_from_letters(alphabet: Sequence[str], transitions: Iterable[tuple[int, int, int]],
                     initial: Iterable[int], final: Iterable[int], n_states: int) -> NondetAutomaton:
    """Finite automaton from explicit ``(source, letter, target)`` triples."""
    full = (1 << len(alphabet)) - 1
    edges = [[] for _ in range(n_states)]
    for s, v, t in transitions:
        edges[s].append(Edge(v, full & ~v, t))
    return NondetAutomaton(tuple(alphabet), edges, frozenset(initial), frozenset(final), "finite")


def to_hoa(aut: NondetAutomaton, name: str = "") -> str:
    """Render in the Hanoi Omega-Automata text format."""
    lines = ["HOA: v1"]
    if name:
        lines.append(f'name: "{name}"')
    lines.append(f"States: {aut.n_states}")
    for q in sorted(aut.initial):
        lines.append(f"Start: {q}")
    aps = " ".join(f'"{a}"' for a in aut.alphabet)
    lines.append(f"AP: {len(aut.alphabet)} {aps}".rstrip())
    lines.append("acc-name: Buchi")
    lines.append("Acceptance: 1 Inf(0)")
    lines.append(f"properties: state-acc{' finite-semantics' if aut.kind == 'finite' else ''}")
    lines.append("--BODY--")
    for q, out in enumerate(aut.edges):
        acc = " {0}" if q in aut.accepting else ""
        label = f' "{aut.names[q]}"' if aut.names else ""
        lines.append(f"State: {q}{label}{acc}")
        for e in out:
            lits = []
            for i in range(len(aut.alphabet)):
                if e.pos >> i & 1:
                    lits.append(str(i))
                elif e.neg >> i & 1:
                    lits.append(f"!{i}")
            lines.append(f"[{' & '.join(lits) or 't'}] {e.target}")
    lines.append("--END--")
    return "\n".join(lines) + "\n"


def det_to_hoa(d: DetAutomaton) -> str:
    edges = []
    width = len(d.alphabet)
    full = (1 << width) - 1
    for row in d.delta:
        edges.append([Edge(v, full & ~v, t) for v, t in enumerate(row)])
    aut = NondetAutomaton(d.alphabet, edges, frozenset([d.initial]), d.final, "finite")
    return to_hoa(aut)
