"""Repair of unrealizable LTL specifications by genetic search.

Fitness combines a realizability status with syntactic similarity and a
semantic similarity based on bounded model counting.
"""

from .ltl import Formula, LassoWord, Spec, parse, to_string
from .analysis import Relation, classify_relation, is_sat, is_valid
from .counting import count_lassos_exact, count_models_approx
from .realizability import Backend, BackendConfig, Verdict, check_realizability
from .fitness import Weights, evaluate_fitness, sem_sim, status_score, syn_sim
from .search import GAConfig, RepairReport, run_ga, run_random_baseline
from .harness import compare_repair_sets, load_spec_file, save_spec_file, vargha_delaney_a12

__all__ = [
    "Formula", "LassoWord", "Spec", "parse", "to_string",
    "Relation", "classify_relation", "is_sat", "is_valid",
    "count_lassos_exact", "count_models_approx",
    "Backend", "BackendConfig", "Verdict", "check_realizability",
    "Weights", "evaluate_fitness", "sem_sim", "status_score", "syn_sim",
    "GAConfig", "RepairReport", "run_ga", "run_random_baseline",
    "compare_repair_sets", "load_spec_file", "save_spec_file", "vargha_delaney_a12",
]
__version__ = "0.1.0"
