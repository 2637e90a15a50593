"""Compare the mock 2-approximate order finder with and without tensoring.

For each random narrow ROABP, print the optimal width, the width of the
order the mock returns on f directly, and the width after boosting.
"""

import argparse
import math
import random
from fractions import Fraction

from roabp_order.boost import MockTwoApprox, width_in_order, width_ptas
from roabp_order.orderfind import brute_force_best_order
from roabp_order.poly import dense_oracle
from roabp_order.roabp import roabp_to_dense, sample_random_roabp


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=20)
    ap.add_argument("--epsilon", default="1/4")
    ap.add_argument("--w", type=int, default=2)
    ap.add_argument("--seed", type=int, default=8)
    args = ap.parse_args()
    eps = Fraction(args.epsilon)
    rng = random.Random(args.seed)
    over = 0
    print("n\topt\tmock\tboosted\tk\tbound")
    for i in range(args.instances):
        n = 3 + i % 3
        order = list(range(n))
        rng.shuffle(order)
        f = roabp_to_dense(sample_random_roabp(n, 1, args.w, order, rng))
        opt = brute_force_best_order(f)[0]
        plain = MockTwoApprox()(dense_oracle(f), n, 1)[1]
        res = width_ptas(dense_oracle(f), n, 1, eps, MockTwoApprox())
        got = width_in_order(f, res.order)
        bound = math.ceil((1 + eps) * opt)
        over += got > bound
        print(f"{n}\t{opt}\t{plain}\t{got}\t{res.k}\t{bound}")
    print(f"over_bound: {over}")


if __name__ == "__main__":
    main()
