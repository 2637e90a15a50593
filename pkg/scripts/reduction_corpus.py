"""Check the rank = 2 + cut identity and width = cutwidth + 2 over a graph corpus.

The corpus is every connected labelled graph up to --max-n vertices plus
--random G(n, 1/2) graphs on --random-n vertices.
"""

import argparse
import itertools
import random
import time

from roabp_order.orderfind import brute_force_best_order
from roabp_order.reduction import Graph, build_gadget_poly, certify_rank_cut_identity, cutwidth_exact


def is_connected(G):
    seen, stack = {0}, [0]
    while stack:
        for v in G.neighbors[stack.pop()]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == G.n


def corpus(max_n, n_random, random_n, seed):
    for n in range(2, max_n + 1):
        pairs = list(itertools.combinations(range(n), 2))
        for mask in range(1 << len(pairs)):
            G = Graph.from_edges(n, [e for i, e in enumerate(pairs) if mask >> i & 1])
            if is_connected(G):
                yield "connected", G
    rng = random.Random(seed)
    for _ in range(n_random):
        edges = [e for e in itertools.combinations(range(random_n), 2) if rng.random() < 0.5]
        yield "random", Graph.from_edges(random_n, edges)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=5)
    ap.add_argument("--random", type=int, default=20)
    ap.add_argument("--random-n", type=int, default=6)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()

    t0 = time.perf_counter()
    counts, bad = {}, 0
    for kind, G in corpus(args.max_n, args.random, args.random_n, args.seed):
        cert = certify_rank_cut_identity(G)
        width = brute_force_best_order(build_gadget_poly(G).to_dense())[0]
        cw = cutwidth_exact(G)[0]
        key = (kind, G.n)
        counts[key] = counts.get(key, 0) + 1
        if not cert.passed or width != cw + 2:
            bad += 1
            print(f"MISMATCH n={G.n} edges={G.sorted_edges()} width={width} cutwidth={cw} "
                  f"failed_partitions={len(cert.failures())}")
    for (kind, n), c in sorted(counts.items()):
        print(f"{kind} n={n}: {c} graphs")
    print(f"mismatches: {bad}")
    print(f"elapsed: {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
