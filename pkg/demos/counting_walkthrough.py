"""Bounded model counting for G (p -> X q), step by step.

Prints the automata sizes, the transfer matrix, its fourth power and the
resulting prefix count, then the exact lasso count for comparison.

    python demos/counting_walkthrough.py
"""

from specrepair import automata, counting, ltl

ALPHABET = ("p", "q")
K = 4


def main():
    f = ltl.parse("G (p -> X q)")
    print("formula:", ltl.to_string(f))

    buchi = automata.ltl_to_buchi(ltl.normalize_to_core(f), ALPHABET)
    print(f"Büchi automaton: {buchi.n_states} states, accepting {sorted(buchi.accepting)}")

    nfa = automata.finitize(buchi)
    dfa = automata.minimize(automata.determinize(nfa))
    print(f"minimal DFA: {dfa.n_states} states (the sink included), final {sorted(dfa.final)}")

    # drop the sink; minimization has merged the initial state with the state
    # that owes nothing, so two live states remain
    t = counting.build_transfer_matrix(dfa, trim=True)
    print("transfer matrix T (entry i,j = letters from state i to j):")
    print(t.matrix)
    print(f"T^{K}:")
    print(counting.matrix_power(t, K))
    print("initial vector", list(t.initial), " final vector", list(t.final))

    approx = counting.count_prefixes(t, K)
    print(f"prefixes of length {K} accepted: {approx}")

    exact = counting.count_lassos_exact(f, K, ALPHABET)
    print(f"(base, loop) lasso pairs of length {K} that satisfy the formula: {exact}")
    print(f"out of {2 ** (len(ALPHABET) * K) * K} pairs in total")


if __name__ == "__main__":
    main()
