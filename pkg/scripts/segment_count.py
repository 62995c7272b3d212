"""Number of lines the segmented fit uses on seeded tri-modulus data (k = 5, mu = 2)."""

import argparse

from segbound.experiments import tri_modulus_segment_counts


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--k", type=int, default=5)
    ap.add_argument("--mu", type=float, default=2.0)
    args = ap.parse_args()
    counts = tri_modulus_segment_counts(range(args.seeds), args.k, args.mu)
    for s, c in enumerate(counts):
        print(f"seed {s}: {c} segments")
    print(f"{sum(c == 3 for c in counts)} of {len(counts)} seeds give 3 segments")


if __name__ == "__main__":
    main()
