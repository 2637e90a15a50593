"""Disagreement rate of the randomized rank test against exact ranks, per prime.

Only triples where sampling actually happens and the per-trial error bound
is below 1 are counted; the observed rate is printed next to the mean bound.
"""

import argparse
import random
from fractions import Fraction

from roabp_order.ffield import PrimeField
from roabp_order.nisan import VarSubset, nisan_rank, prob_rank_at_most
from roabp_order.poly import DensePoly
from roabp_order.roabp import roabp_to_dense, sample_random_roabp


def random_triple(rng, field, max_n):
    n = rng.randint(2, max_n)
    d = rng.randint(1, 2)
    if rng.random() < 0.5:
        order = list(range(n))
        rng.shuffle(order)
        f = roabp_to_dense(sample_random_roabp(n, d, rng.randint(1, 3), order, rng, field))
    else:
        f = DensePoly(n, d, [rng.randrange(field.p) for _ in range((d + 1) ** n)], field)
    T = VarSubset.of(rng.sample(range(n), rng.randint(1, n - 1)), n)
    return f, T, rng.randint(1, 3)


def sweep(p, runs, trials, rng, max_n):
    field = PrimeField(p)
    done, wrong, bound = 0, 0, Fraction(0)
    while done < runs:
        f, T, w = random_triple(rng, field, max_n)
        if f.n * f.d * (w + 1) ** 2 * trials >= p or (f.d + 1) ** min(len(T), f.n - len(T)) <= w:
            continue
        rep = prob_rank_at_most(f, T, w, trials, rng)
        wrong += rep.at_most != (nisan_rank(f, T) <= w)
        bound += rep.failure_bound
        done += 1
    return wrong, bound / runs


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--primes", default="101,211,1009,10007,2305843009213693951")
    ap.add_argument("--runs", type=int, default=2000)
    ap.add_argument("--trials", type=int, default=1)
    ap.add_argument("--max-n", type=int, default=4)
    ap.add_argument("--seed", type=int, default=10)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    print("prime\truns\twrong\trate\tmean_bound")
    for p in map(int, args.primes.split(",")):
        wrong, mean_bound = sweep(p, args.runs, args.trials, rng, args.max_n)
        print(f"{p}\t{args.runs}\t{wrong}\t{wrong / args.runs:.4f}\t{float(mean_bound):.4f}")


if __name__ == "__main__":
    main()
