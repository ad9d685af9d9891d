"""Spec files, repair-set comparison, effect sizes and the counting ranking study."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from . import analysis, counting, ltl
from .analysis import Relation
from .ltl import Spec

KEYS = ("NAME", "INPUTS", "OUTPUTS", "ASSUMPTION", "GUARANTEE")


class SpecFileError(ValueError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        where = ""
        if path:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
        self.line = line
        self.path = path


@dataclass(frozen=True)
class SpecFile:
    path: str | None
    spec: Spec
    name: str
    source: str = "file"


def parse_spec_text(text: str, path: str | None = None) -> SpecFile:
    fields: dict[str, tuple[int, str]] = {}
    formulas: list[tuple[str, int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        key = key.strip().upper()
        if not sep or key not in KEYS:
            raise SpecFileError(f"expected one of {', '.join(KEYS)} followed by ':'", lineno, path)
        value = value.strip()
        if key in ("ASSUMPTION", "GUARANTEE"):
            if not value:
                raise SpecFileError(f"empty {key} line", lineno, path)
            formulas.append((key, lineno, value))
        elif key in fields:
            raise SpecFileError(f"duplicate {key} line", lineno, path)
        else:
            fields[key] = (lineno, value)

    inputs = tuple(fields["INPUTS"][1].split()) if "INPUTS" in fields else ()
    outputs = tuple(fields["OUTPUTS"][1].split()) if "OUTPUTS" in fields else ()
    for key, names in (("INPUTS", inputs), ("OUTPUTS", outputs)):
        if len(set(names)) != len(names):
            raise SpecFileError(f"repeated variable in {key}", fields[key][0], path)
        bad = [n for n in names if n in ltl.RESERVED or not n.isidentifier()]
        if bad:
            raise SpecFileError(f"invalid variable names {bad}", fields[key][0], path)
    overlap = set(inputs) & set(outputs)
    if overlap:
        line = fields["OUTPUTS"][0]
        raise SpecFileError(f"variables both input and output: {sorted(overlap)}", line, path)

    alphabet = inputs + outputs
    assumptions, guarantees = [], []
    for key, lineno, body in formulas:
        try:
            f = ltl.parse(body, alphabet)
        except ltl.UnknownAtomError as exc:
            raise SpecFileError(f"undeclared variable {exc.atom!r}", lineno, path) from None
        except ltl.LTLSyntaxError as exc:
            raise SpecFileError(f"syntax error: {exc}", lineno, path) from None
        (assumptions if key == "ASSUMPTION" else guarantees).append(f)
    if not guarantees:
        raise SpecFileError("a specification needs at least one GUARANTEE line", None, path)
    name = fields["NAME"][1] if "NAME" in fields else (Path(path).stem if path else "spec")
    spec = Spec(inputs, outputs, tuple(assumptions), tuple(guarantees), name)
    return SpecFile(path, spec, name)


def load_spec_file(path: str | Path) -> SpecFile:
    path = str(path)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecFileError(f"cannot read file: {exc.strerror}", None, path) from None
    return parse_spec_text(text, path)


def format_spec(spec: Spec) -> str:
    lines = [f"NAME: {spec.name}", "INPUTS: " + " ".join(spec.inputs),
             "OUTPUTS: " + " ".join(spec.outputs)]
    lines += [f"ASSUMPTION: {ltl.to_string(f)}" for f in spec.assumptions]
    lines += [f"GUARANTEE: {ltl.to_string(f)}" for f in spec.guarantees]
    return "\n".join(lines) + "\n"


def save_spec_file(spec: Spec, path: str | Path) -> None:
    Path(path).write_text(format_spec(spec), encoding="utf-8")


# -- comparing repair sets -------------------------------------------------------------


@dataclass
class OverlapSummary:
    unique: int = 0
    equivalent: int = 0
    weaker: int = 0
    stronger: int = 0
    records: list[tuple[int, int, Relation]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"unique": self.unique, "equivalent": self.equivalent,
                "weaker": self.weaker, "stronger": self.stronger,
                "records": [{"ours": i, "reference": j, "relation": r.value}
                            for i, j, r in self.records]}


def compare_repair_sets(ours: Sequence[Spec], reference: Sequence[Spec]) -> OverlapSummary:
    """Classify each of ``ours`` against every reference repair.

    A repair is equivalent if it matches some reference as equivalent and
    unique otherwise; unique repairs are further counted as weaker or stronger
    when they are weaker or stronger than some reference.
    """
    out = OverlapSummary()
    for i, s in enumerate(ours):
        rels = []
        for j, r in enumerate(reference):
            rel = analysis.classify_relation(s.implication(), r.implication())
            out.records.append((i, j, rel))
            rels.append(rel)
        if Relation.EQUIVALENT in rels:
            out.equivalent += 1
            continue
        out.unique += 1
        if Relation.WEAKER in rels:
            out.weaker += 1
        if Relation.STRONGER in rels:
            out.stronger += 1
    return out


def vargha_delaney_a12(a: Sequence[float], b: Sequence[float]) -> float:
    """Probability that a draw from ``a`` beats one from ``b``, ties counting half."""
    if len(a) == 0 or len(b) == 0:
        raise ValueError("both samples must be nonempty")
    x = np.asarray(a, dtype=float)[:, None]
    y = np.asarray(b, dtype=float)[None, :]
    wins = np.sum(x > y) + 0.5 * np.sum(x == y)
    return float(wins / (x.size * y.size))


# -- ranking study ---------------------------------------------------------------------


def ranking_positions(counts: Sequence[int]) -> list[int]:
    """Position of each item in the stable ascending order of ``counts``."""
    order = sorted(range(len(counts)), key=lambda i: counts[i])
    pos = [0] * len(counts)
    for p, i in enumerate(order):
        pos[i] = p
    return pos


def ranking_discrepancy(reference: Sequence[int], other: Sequence[int]) -> int:
    """Number of items whose position differs between the two stable rankings."""
    a, b = ranking_positions(reference), ranking_positions(other)
    return sum(1 for x, y in zip(a, b) if x != y)


def rank_correlation(a: Sequence[int], b: Sequence[int]) -> float:
    """Spearman's rho; two constant rankings agree perfectly."""
    if len(set(a)) <= 1 or len(set(b)) <= 1:
        return 1.0 if len(set(a)) <= 1 and len(set(b)) <= 1 else 0.0
    return float(stats.spearmanr(a, b).statistic)


@dataclass
class RankingSet:
    index: int
    k: int
    formulas: list[str]
    exact: list[int]
    approx: list[int]
    skipped: list[str]
    discrepancy: int
    correlation: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def run_ranking_study(set_count: int = 5, formulas_per_set: int = 20,
                      alphabet: Sequence[str] = ("p", "q"), k_range: tuple[int, int] = (6, 8),
                      rng: random.Random | None = None, size_range: tuple[int, int] = (2, 10),
                      formula_sets: Iterable[Sequence[ltl.Formula]] | None = None) -> list[RankingSet]:
    """Rank random formulas by approximate and by exact counts and compare.

    Each set draws its own bound from ``k_range``.  Formulas whose exact count
    is infeasible are skipped and listed.  ``formula_sets`` replaces the
    random generation.
    """
    rng = rng or random.Random(0)
    alphabet = tuple(alphabet)
    if formula_sets is None:
        formula_sets = [[ltl.random_formula(rng, alphabet, rng.randint(*size_range))
                         for _ in range(formulas_per_set)] for _ in range(set_count)]
    out = []
    for index, formulas in enumerate(formula_sets):
        k = rng.randint(*k_range)
        kept, exact, skipped = [], [], []
        for f in formulas:
            try:
                exact.append(counting.count_lassos_exact(f, k, alphabet))
                kept.append(f)
            except counting.InfeasibleCount:
                skipped.append(ltl.to_string(f))
        approx = [counting.count_models_approx(f, k, alphabet) for f in kept]
        out.append(RankingSet(index, k, [ltl.to_string(f) for f in kept], exact, approx, skipped,
                              ranking_discrepancy(exact, approx), rank_correlation(exact, approx)))
    return out
