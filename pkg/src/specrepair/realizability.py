"""Realizability checking: a bounded-synthesis solver and an external-tool adapter.

The builtin solver plays two safety games per bound ``b``.  For the system,
the objective is that every run of the Büchi automaton for the negated
implication A -> G visits accepting states at most ``b`` times (a universal
co-Büchi reading of A -> G).  For the environment the roles are swapped:
every run of the automaton for A -> G itself must stay bounded.  Each round the environment picks the inputs first and the system
answers with the outputs.  A win for either side is a sound verdict; if
neither side wins up to the maximal bound the answer is unknown.
"""

from __future__ import annotations

import enum
import os
import re
import shlex
import subprocess
import tempfile
from dataclasses import dataclass, field

from . import automata, ltl
from .ltl import Spec


class Verdict(str, enum.Enum):
    REALIZABLE = "realizable"
    UNREALIZABLE = "unrealizable"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class RealizabilityVerdict:
    status: Verdict
    reason: str | None = None
    bound: int | None = None

    @property
    def definite(self) -> bool:
        return self.status is not Verdict.UNKNOWN

    def __str__(self) -> str:
        if self.status is Verdict.UNKNOWN:
            return f"unknown({self.reason})"
        return self.status.value


REALIZABLE = RealizabilityVerdict(Verdict.REALIZABLE)
UNREALIZABLE = RealizabilityVerdict(Verdict.UNREALIZABLE)


def unknown(reason: str) -> RealizabilityVerdict:
    return RealizabilityVerdict(Verdict.UNKNOWN, reason)


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "builtin"
    max_bound: int = 6
    command: str | None = None
    timeout: float = 60.0
    max_states: int = 200_000

    def __post_init__(self):
        if self.kind == "builtin":
            if self.max_bound < 1:
                raise ValueError("max_bound must be positive")
        elif self.kind == "external":
            if not self.command or not any(p in self.command for p in ("{formula}", "{file}")):
                raise ValueError("external command needs a {formula} or {file} placeholder")
            if self.timeout <= 0:
                raise ValueError("timeout must be positive")
        else:
            raise ValueError(f"unknown backend kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "BackendConfig":
        """``builtin``, ``builtin:N`` or ``external:COMMAND``."""
        kind, _, rest = text.partition(":")
        if kind == "builtin":
            return cls("builtin", max_bound=int(rest) if rest else 6)
        if kind == "external":
            return cls("external", command=rest)
        raise ValueError(f"cannot parse backend {text!r}")


def check_realizability(spec: Spec, cfg: BackendConfig) -> RealizabilityVerdict:
    if cfg.kind == "builtin":
        return builtin_bounded_realizability(spec, cfg.max_bound, cfg.max_states)
    return external_realizability(spec, cfg.command, cfg.timeout)


class Backend:
    """A configured checker with a per-instance verdict cache."""

    def __init__(self, cfg: BackendConfig | None = None):
        self.cfg = cfg or BackendConfig()
        self.calls = 0
        self._cache: dict[tuple, RealizabilityVerdict] = {}

    def check(self, spec: Spec, use_cache: bool = True) -> RealizabilityVerdict:
        key = (spec.inputs, spec.outputs, ltl.to_string(spec.implication()))
        if use_cache and key in self._cache:
            return self._cache[key]
        self.calls += 1
        try:
            verdict = check_realizability(spec, self.cfg)
        except Exception as exc:  # a broken backend never aborts a search
            verdict = unknown(f"backend-failure: {exc}")
        self._cache[key] = verdict
        return verdict

    def __getstate__(self):
        return {"cfg": self.cfg, "calls": 0, "_cache": {}}


# -- bounded synthesis -------------------------------------------------------------


class _Arena:
    """Counter-function game arena built from a state-based Büchi automaton."""

    def __init__(self, aut: automata.NondetAutomaton, n_inputs: int):
        self.n_q = aut.n_states
        self.n_inputs = n_inputs
        self.n_outputs = len(aut.alphabet) - n_inputs
        table = aut.successor_table()
        self.succ = [[[t for t in range(self.n_q) if mask >> t & 1] for mask in row] for row in table]
        self.acc = [1 if q in aut.accepting else 0 for q in range(self.n_q)]
        self.initial = tuple(self.acc[q] if q in aut.initial else -1 for q in range(self.n_q))

    def step(self, counters: tuple, letter: int, bound: int):
        new = [-1] * self.n_q
        for q, c in enumerate(counters):
            if c < 0:
                continue
            for t in self.succ[q][letter]:
                value = c + self.acc[t]
                if value > new[t]:
                    if value > bound:
                        return None
                    new[t] = value
        return tuple(new)

    def safety_player_wins(self, bound: int, system: bool, max_states: int) -> bool:
        """Whether the safety player keeps all counters within ``bound``.

        ``system`` selects who the safety player is.  Raises
        ``AutomatonTooLarge`` when the arena exceeds ``max_states``.
        """
        if self.n_q == 0:
            return True
        if max(self.initial) > bound:
            return False
        n_x = 1 << self.n_inputs
        n_y = 1 << self.n_outputs
        shift = self.n_inputs
        index = {self.initial: 0}
        states = [self.initial]
        moves: list[list[list[int]]] = []
        i = 0
        while i < len(states):
            s = states[i]
            i += 1
            rows = []
            for x in range(n_x):
                row = []
                for y in range(n_y):
                    t = self.step(s, x | (y << shift), bound)
                    if t is None:
                        row.append(-1)
                        continue
                    j = index.get(t)
                    if j is None:
                        if len(states) >= max_states:
                            raise automata.AutomatonTooLarge("game arena too large")
                        j = index[t] = len(states)
                        states.append(t)
                    row.append(j)
                rows.append(row)
            moves.append(rows)

        win = [True] * len(states)
        changed = True
        while changed:
            changed = False
            for s, rows in enumerate(moves):
                if not win[s]:
                    continue
                if system:
                    ok = all(any(t >= 0 and win[t] for t in row) for row in rows)
                else:
                    ok = any(all(t >= 0 and win[t] for t in row) for row in rows)
                if not ok:
                    win[s] = False
                    changed = True
        return win[0]


def builtin_bounded_realizability(spec: Spec, max_bound: int = 6,
                                  max_states: int = 200_000) -> RealizabilityVerdict:
    alphabet = spec.inputs + spec.outputs
    phi = spec.implication()
    try:
        neg_aut = automata.ltl_to_buchi(ltl.neg(phi), alphabet, max_states)
        pos_aut = automata.ltl_to_buchi(phi, alphabet, max_states)
    except automata.AutomatonTooLarge:
        return unknown("resource")
    system = _Arena(neg_aut, len(spec.inputs))
    environment = _Arena(pos_aut, len(spec.inputs))
    sys_open = env_open = True
    for b in range(1, max_bound + 1):
        if sys_open:
            try:
                if system.safety_player_wins(b, True, max_states):
                    return RealizabilityVerdict(Verdict.REALIZABLE, bound=b)
            except automata.AutomatonTooLarge:
                sys_open = False
        if env_open:
            try:
                if environment.safety_player_wins(b, False, max_states):
                    return RealizabilityVerdict(Verdict.UNREALIZABLE, bound=b)
            except automata.AutomatonTooLarge:
                env_open = False
        if not (sys_open or env_open):
            return unknown("resource")
    return unknown("bound-exhausted")


# -- external tools --------------------------------------------------------------


def to_tlsf(spec: Spec) -> str:
    def block(title, items):
        body = "".join(f"    {item};\n" for item in items)
        return f"  {title} {{\n{body}  }}\n"

    return (
        "INFO {\n"
        f'  TITLE:       "{spec.name}"\n'
        '  DESCRIPTION: ""\n'
        "  SEMANTICS:   Mealy\n"
        "  TARGET:      Mealy\n"
        "}\n"
        "MAIN {\n"
        + block("INPUTS", spec.inputs)
        + block("OUTPUTS", spec.outputs)
        + (block("ASSUMPTIONS", [ltl.to_string(f) for f in spec.assumptions]) if spec.assumptions else "")
        + block("GUARANTEES", [ltl.to_string(f) for f in spec.guarantees])
        + "}\n"
    )


def parse_tool_output(text: str) -> RealizabilityVerdict:
    tokens = set(re.findall(r"[A-Za-z]+", text.upper()))
    has_unreal = "UNREALIZABLE" in tokens
    has_real = "REALIZABLE" in tokens
    if has_unreal and not has_real:
        return UNREALIZABLE
    if has_real and not has_unreal:
        return REALIZABLE
    return unknown("backend-failure: no verdict in tool output")


def external_realizability(spec: Spec, command: str, timeout: float = 60.0) -> RealizabilityVerdict:
    values = {
        "{formula}": ltl.to_string(spec.implication()),
        "{ins}": ",".join(spec.inputs),
        "{outs}": ",".join(spec.outputs),
    }
    path = None
    try:
        if "{file}" in command:
            fd, path = tempfile.mkstemp(suffix=".tlsf")
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(to_tlsf(spec))
            values["{file}"] = path
        args = []
        for part in shlex.split(command):
            for key, value in values.items():
                part = part.replace(key, value)
            args.append(part)
        try:
            proc = subprocess.run(args, capture_output=True, text=True, timeout=timeout)
        except subprocess.TimeoutExpired:
            return unknown("timeout")
        except OSError as exc:
            return unknown(f"backend-failure: {exc}")
        if proc.returncode != 0:
            return unknown(f"backend-failure: exit status {proc.returncode}")
        return parse_tool_output(proc.stdout)
    finally:
        if path:
            os.unlink(path)
