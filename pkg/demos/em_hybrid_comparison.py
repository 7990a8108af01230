"""Plain EM vs the project-then-lift hybrid, head to head.

Each trial draws a fresh 1-separated five-component spherical mixture,
fits it both ways from the same seed, and scores the fits by whether every
estimated center lands within a third of the true cluster radius, plus the
test log-likelihood. Dimension hurts plain EM; the hybrid shrugs it off.

Run: python3 demos/em_hybrid_comparison.py [--trials 15]
"""

import argparse

import numpy as np

from rpmix.experiments import em_compare_trial


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=15)
    args = parser.parse_args()

    print("%6s  %12s  %12s  %12s" % ("n", "plain ok", "hybrid ok", "hybrid beats"))
    for n in (50, 100, 200):
        rows = [em_compare_trial(n, 10_000 + t) for t in range(args.trials)]
        reg = np.mean([r["reg_success"] for r in rows])
        rp = np.mean([r["rp_success"] for r in rows])
        beats = np.mean([r["rp_beats"] for r in rows])
        print("%6d  %11.0f%%  %11.0f%%  %11.0f%%" % (n, 100 * reg, 100 * rp, 100 * beats))

    print()
    print("Plain EM's success rate slides as n grows; the hybrid, which does")
    print("its real work in a random 25-dimensional shadow of the data and")
    print("then takes a single high-dimensional EM step, stays put and wins")
    print("most test-likelihood comparisons outright.")


if __name__ == "__main__":
    main()
