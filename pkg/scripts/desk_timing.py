"""Wall time of the full truss run at lambda = 1: data, fit, set, both bounds."""

import time

from segbound.boundprob import bound
from segbound.experiments import prepare


def main():
    t0 = time.perf_counter()
    su = prepare("truss-3x2", "uy:node=r3c4")
    t1 = time.perf_counter()
    res = bound(su.system, su.sets, su.qoi, 1.0)
    t2 = time.perf_counter()
    print(f"binaries: {sum(su.sets[g].k - 1 for g in su.system.groups)}")
    print(f"prepare {t1 - t0:.2f} s, bound {t2 - t1:.2f} s, total {t2 - t0:.2f} s")
    print(f"[{res.q_lower:.5f}, {res.q_upper:.5f}] nodes {res.nodes} "
          f"gaps ({res.gap_lower:.1e}, {res.gap_upper:.1e})")


if __name__ == "__main__":
    main()
