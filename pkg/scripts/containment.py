"""Reference solution against the computed bounds over the load-factor grid.

    python scripts/containment.py --model truss-3x2
    python scripts/containment.py --model cable-strut --qoi uz:node=T1
"""

import argparse

from segbound.experiments import LAMBDAS, containment, prepare
from segbound.pipeline import DEFAULT_QOI


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", default="truss-3x2")
    ap.add_argument("--qoi", default=None)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--epsilon", type=float, default=0.1)
    ap.add_argument("--delta", type=float, default=0.1)
    args = ap.parse_args()
    su = prepare(args.model, args.qoi or DEFAULT_QOI[args.model], seed=args.seed,
                 epsilon=args.epsilon, delta=args.delta)
    for g, s in sorted(su.sets.items()):
        print(f"# {g}: r={su.data[g].r} segments={s.k} ptilde={s.ptilde} tau={s.tau:.6g}")
    print(f"# qoi {su.qoi.label}")
    print(f"{'lam':>5} {'q_lower':>12} {'reference':>12} {'q_upper':>12} {'inside':>7} "
          f"{'nodes':>11} {'s':>6}")
    total = 0.0
    for row in containment(su, LAMBDAS):
        total += row.seconds
        print(f"{row.lam:5.1f} {row.q_lower:12.5f} {row.q_ref:12.5f} {row.q_upper:12.5f} "
              f"{str(row.inside):>7} {str(row.nodes):>11} {row.seconds:6.1f}")
    print(f"# total {total:.1f} s")


if __name__ == "__main__":
    main()
