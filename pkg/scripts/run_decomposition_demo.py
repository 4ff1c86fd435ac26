#!/usr/bin/env python3
"""Build a scrambled direct sum with hidden block structure, recover it,
and print the verdict report as JSON."""

import argparse
import json

import numpy as np

from nhomog import homogeneity_verdict, reconstruct_generators
from nhomog.instances import random_homogeneous_instance
from nhomog.jsonio import dump_report
from nhomog.matrix_core import opnorm


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--n", type=int, default=2, help="block size of the hidden irreducibles")
    parser.add_argument("--classes", type=int, default=2)
    parser.add_argument("--k", type=int, default=2, help="number of generators")
    parser.add_argument("--zero-dim", type=int, default=1)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    t, meta = random_homogeneous_instance(
        rng, n=args.n, k=args.k, num_classes=args.classes, max_mult=2, zero_dim=args.zero_dim
    )
    print(f"instance: d={t.d}, k={t.k}, hidden multiplicities {meta['multiplicities']}, "
          f"zero block of dim {meta['zero_dim']}")
    report = homogeneity_verdict(t, args.n, seed=args.seed)
    rec = reconstruct_generators(report.decomposition)
    roundtrip = max(
        opnorm(a - b) / (1.0 + opnorm(b)) for a, b in zip(rec.gens, t.gens)
    )
    payload = report.to_json()
    payload["reconstruction_relative_error"] = roundtrip
    print(dump_report(payload))


if __name__ == "__main__":
    main()
