"""Do approximate prefix counts rank formulas like exact lasso counts do?

Draws random formulas over two atoms, ranks them both ways and prints, per
set, how many formulas land in a different position and Spearman's rho.
The last set is listed in full.

    python demos/ranking_study.py [seed]
"""

import random
import sys

from specrepair.harness import ranking_positions, run_ranking_study


def main(seed=0):
    sets = run_ranking_study(5, 20, ("p", "q"), (6, 8), random.Random(seed))
    print("set  k  misplaced  rho")
    for s in sets:
        print(f"{s.index:>3} {s.k:>2} {s.discrepancy:>10} {s.correlation:>5.2f}")

    last = sets[-1]
    ex, ap = ranking_positions(last.exact), ranking_positions(last.approx)
    print(f"\nset {last.index}, k={last.k}:")
    print(f"{'exact':>12} {'rank':>4} {'approx':>14} {'rank':>4}  formula")
    for i in sorted(range(len(last.formulas)), key=lambda i: ex[i]):
        mark = " " if ex[i] == ap[i] else "*"
        print(f"{last.exact[i]:>12} {ex[i]:>4} {last.approx[i]:>14} {ap[i]:>4} {mark} {last.formulas[i]}")


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:2]))
