"""Run the order finder on seeded random ROABPs and report success, list sizes and timings.

    python3 scripts/random_roabp_sweep.py --n 8 --d 2 --w 3 --runs 100
"""

import argparse
import random
import statistics
import time

from roabp_order.ffield import PrimeField, resolve_prime
from roabp_order.nisan import exact_width_in_order
from roabp_order.orderfind import NoPathFailure, find_order
from roabp_order.roabp import roabp_to_dense, sample_random_roabp


def one_run(n, d, w, seed, field, verify):
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    R = sample_random_roabp(n, d, w, order, rng, field)
    t0 = time.perf_counter()
    try:
        res = find_order(R.oracle(), n, d, w, rng, verify=verify)
    except NoPathFailure as e:
        return dict(seed=seed, found=False, reason=e.reason, elapsed=time.perf_counter() - t0)
    elapsed = time.perf_counter() - t0
    width = exact_width_in_order(roabp_to_dense(R), res.tau)[0]
    return dict(seed=seed, found=True, width=width, tests=res.lists.tests,
                sizes=res.lists.sizes(), elapsed=elapsed)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--w", type=int, default=3)
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0, help="first seed; run i uses seed+i")
    ap.add_argument("--prime", type=int)
    ap.add_argument("--verify", default="none", choices=("none", "exact", "probabilistic", "auto"))
    ap.add_argument("--quiet", action="store_true")
    args = ap.parse_args()

    field = PrimeField(resolve_prime(args.prime))
    k = 1
    while (args.d + 1) ** k <= args.w:
        k += 1
    rows = []
    for i in range(args.runs):
        r = one_run(args.n, args.d, args.w, args.seed + i, field, args.verify)
        rows.append(r)
        if not args.quiet:
            if r["found"]:
                print(f"seed={r['seed']} width={r['width']} tests={r['tests']} "
                      f"sizes={','.join(map(str, r['sizes']))} time={r['elapsed']:.3f}s")
            else:
                print(f"seed={r['seed']} failed ({r['reason']}) time={r['elapsed']:.3f}s")

    found = [r for r in rows if r["found"]]
    good = sum(r["width"] <= args.w for r in found)
    large = sum(any(s > 2 for s in r["sizes"][k:args.n - k + 1]) for r in found)
    print(f"runs: {len(rows)}")
    print(f"width_ok: {good}")
    print(f"large_middle_lists: {large} (levels {k}..{args.n - k})")
    if found:
        print(f"subset_tests_max: {max(r['tests'] for r in found)} (4n^2 = {4 * args.n ** 2})")
    print(f"time_median: {statistics.median(r['elapsed'] for r in rows):.3f}s")
    print(f"time_max: {max(r['elapsed'] for r in rows):.3f}s")


if __name__ == "__main__":
    main()
