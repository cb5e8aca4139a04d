#!/usr/bin/env python3
"""Seeded uniqueness batteries over random instances.

Runs three experiments and prints per-battery statistics:
  * bipartite matching of permuted/phased twins,
  * tripartite matching across independence profiles,
  * blind extraction checked against the planted ground truth.

Example:
    python scripts/uniqueness_battery.py --count 500 --seed 1
"""

import argparse
import sys
import time

import numpy as np

import proddecomp as pd


def bi_battery(count: int, master_seed: int) -> tuple[int, float]:
    rng = np.random.default_rng(master_seed)
    worst = 0.0
    ok = 0
    for i in range(count):
        profile = pd.BI_PROFILES[i % 3]
        n = int(rng.integers(3 if profile != "both-independent" else 2, 7))
        d1 = int(rng.integers(n if profile != "b-independent-only" else 2, 9))
        d2 = int(rng.integers(n if profile != "a-independent-only" else 2, 9))
        seed = int(rng.integers(0, 2**31))
        dec = pd.generate_instance(n, d1, d2, seed=seed, profile=profile)
        twin, perm = pd.phase_permuted_twin(dec, seed=seed + 1)
        result = pd.match_bidecomposition(dec, twin)
        if result.permutation == perm:
            ok += 1
            worst = max(worst, result.residual)
    return ok, worst


def tri_battery(count: int, master_seed: int) -> tuple[int, float]:
    rng = np.random.default_rng(master_seed)
    worst = 0.0
    ok = 0
    for i in range(count):
        profile = pd.TRI_PROFILES[i % 4]
        dep = {"all-independent": None, "a-dependent": 0, "b-dependent": 1, "c-dependent": 2}[profile]
        n = int(rng.integers(2 if dep is None else 3, 7))
        dims = tuple(int(rng.integers(2 if s == dep else n, 9)) for s in range(3))
        seed = int(rng.integers(0, 2**31))
        tri = pd.generate_tri_instance(n, *dims, seed=seed, profile=profile)
        twin, perm = pd.phase_permuted_twin(tri, seed=seed + 1)
        result = pd.match_tridecomposition(tri, twin)
        if result.permutation == perm:
            ok += 1
            worst = max(worst, result.residual)
    return ok, worst


def extraction_battery(count: int, master_seed: int) -> tuple[int, float, int]:
    rng = np.random.default_rng(master_seed)
    worst = 0.0
    probes = 0
    ok = 0
    for i in range(count):
        profile = pd.BI_PROFILES[i % 3]
        n = int(rng.integers(3 if profile != "both-independent" else 2, 7))
        d1 = int(rng.integers(n if profile != "b-independent-only" else 2, 9))
        d2 = int(rng.integers(n if profile != "a-independent-only" else 2, 9))
        seed = int(rng.integers(0, 2**31))
        dec = pd.generate_instance(n, d1, d2, seed=seed, profile=profile)
        report = pd.extract_decomposition(pd.build_rho(dec), seed=seed + 1)
        probes += report.probes_used
        result = pd.match_bidecomposition(dec, report.decomposition)
        if result.n == n:
            ok += 1
            worst = max(worst, max(report.reconstruction_error, result.residual))
    return ok, worst, probes


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=200, help="instances per battery")
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    args = parser.parse_args()

    start = time.perf_counter()
    ok, worst = bi_battery(args.count, args.seed)
    print(f"bipartite twins:   {ok}/{args.count} matched, worst residual {worst:.3e}")
    ok, worst = tri_battery(args.count, args.seed + 1)
    print(f"tripartite twins:  {ok}/{args.count} matched, worst residual {worst:.3e}")
    ok, worst, probes = extraction_battery(args.count, args.seed + 2)
    print(
        f"blind extraction:  {ok}/{args.count} certified, worst error {worst:.3e}, "
        f"{probes} probes drawn"
    )
    print(f"elapsed: {time.perf_counter() - start:.2f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
