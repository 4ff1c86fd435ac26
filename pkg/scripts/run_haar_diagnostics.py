#!/usr/bin/env python3
"""Convergence table for Monte-Carlo unitary averaging against the exact
twirl value, across sample budgets."""

import argparse

import numpy as np

from nhomog.haar import McConfig, mc_radius, mc_twirl, twirl_exact
from nhomog.instances import ginibre
from nhomog.matrix_core import opnorm


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--n", type=int, default=3)
    parser.add_argument("--budgets", type=int, nargs="+",
                        default=[1000, 4000, 20000, 80000])
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    a = ginibre(rng, args.n)
    exact = twirl_exact(a)
    print(f"matrix size {args.n}, |a| = {opnorm(a):.4f}")
    print(f"{'samples':>8} {'deviation':>12} {'radius':>12} {'ok':>3}")
    for budget in args.budgets:
        estimate = mc_twirl(a, McConfig(samples=budget, seed=args.seed))
        dev = opnorm(estimate - exact)
        radius = mc_radius(opnorm(a), budget)
        print(f"{budget:>8} {dev:>12.3e} {radius:>12.3e} {'y' if dev <= radius else 'N':>3}")


if __name__ == "__main__":
    main()
