"""Required in-set counts for a few sample sizes and targets."""

from segbound.errors import InfeasibleStatistics
from segbound.orderstats import ReliabilitySpec, binomial_tail, compute_ptilde


def main():
    print(f"{'r':>5} {'eps':>6} {'delta':>6} {'ptilde':>7} {'tail':>12}")
    for r in (50, 100, 200, 500):
        for eps, delta in ((0.1, 0.1), (0.05, 0.1), (0.1, 0.01), (0.01, 0.01)):
            try:
                p = compute_ptilde(ReliabilitySpec(eps, delta, r))
                print(f"{r:5d} {eps:6.2f} {delta:6.2f} {p:7d} {binomial_tail(r, p, eps):12.4e}")
            except InfeasibleStatistics as exc:
                print(f"{r:5d} {eps:6.2f} {delta:6.2f} {'-':>7} min delta {exc.min_delta:.4e}")


if __name__ == "__main__":
    main()
