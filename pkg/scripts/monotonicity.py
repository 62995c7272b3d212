"""Interval width of a truss member stress as the reliability or confidence target rises.

    python scripts/monotonicity.py --member 1
"""

import argparse

from segbound.experiments import prepare, width_study

DELTAS = [0.5, 0.3, 0.2, 0.1, 0.05]
EPSILONS = [0.3, 0.25, 0.2, 0.15, 0.1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--member", default="1")
    ap.add_argument("--lam", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    su = prepare("truss-3x2", f"sigma:member={args.member}", seed=args.seed)
    cache = {}
    for name, pairs in (("1-delta", [(0.1, d) for d in DELTAS]),
                        ("1-epsilon", [(e, 0.1) for e in EPSILONS])):
        print(f"# varying {name}")
        print(f"{'eps':>6} {'delta':>6} {'ptilde':>6} {'tau':>10} {'q_lower':>10} "
              f"{'q_upper':>10} {'width':>10}")
        for row in width_study(su, pairs, args.lam, cache):
            r = row.result
            print(f"{row.epsilon:6.2f} {row.delta:6.2f} {row.ptilde:6d} {row.tau:10.6f} "
                  f"{r.q_lower:10.5f} {r.q_upper:10.5f} {row.width:10.5f}")


if __name__ == "__main__":
    main()
