import itertools
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from roabp_order.ffield import PrimeField
from roabp_order.nisan import VarSubset, exact_width_in_order
from roabp_order.orderfind import (
    GoodSetLists,
    NoPathFailure,
    brute_force_best_order,
    find_order,
    iter_paths,
    max_possible_width,
    min_width_search,
    order_widths,
    populate_graph,
    resolve_verification,
)
from roabp_order.poly import DensePoly, dense_oracle
from roabp_order.reduction import Graph, build_gadget_poly
from roabp_order.roabp import roabp_to_dense, sample_random_roabp

from oracles import brute_width

BIG = PrimeField()


def zz():
    return DensePoly.from_terms(4, 1, BIG, [((a, 1 - a, b, 1 - b), 1) for a in (0, 1) for b in (0, 1)])


def monomial3():
    return DensePoly.from_terms(3, 1, BIG, [((1, 1, 1), 1)])


def members(lists, k):
    return {T.members for T in lists.subsets(k)}


def test_monomial_lists_are_complete(rng):
    lists = populate_graph(dense_oracle(monomial3()), 3, 1, 1, rng)
    assert lists.sizes() == [1, 3, 3]


def test_sum_product_lists(rng):
    lists = populate_graph(dense_oracle(zz()), 4, 1, 2, rng)
    assert members(lists, 1) == {(0,), (1,), (2,), (3,)}
    assert members(lists, 2) == {(0, 1), (2, 3)}
    assert members(lists, 3) == {(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)}


def test_lists_invariants(rng):
    R = sample_random_roabp(6, 2, 2, (4, 1, 5, 0, 2, 3), rng)
    lists = populate_graph(R.oracle(), 6, 2, 2, rng)
    assert lists.levels[0] == [0]
    for k in range(1, 6):
        for T in lists.levels[k]:
            assert T.bit_count() == k
            assert lists.reports[T].at_most
            assert any(T & ~(1 << i) in lists.levels[k - 1] for i in range(6) if T >> i & 1)
    assert lists.tests <= 6 * sum(lists.sizes())


def test_sum_product_width_one_has_empty_first_level(rng):
    lists = populate_graph(dense_oracle(zz()), 4, 1, 1, rng)
    assert lists.sizes()[1] == 0
    with pytest.raises(NoPathFailure) as info:
        find_order(dense_oracle(zz()), 4, 1, 1, rng)
    assert info.value.reason == "no-path"


def test_find_order_sum_product(rng):
    res = find_order(dense_oracle(zz()), 4, 1, 2, rng)
    assert set(res.tau[:2]) in ({0, 1}, {2, 3})
    assert res.verification == "exact" and res.per_layer == (2, 1, 2)
    assert exact_width_in_order(zz(), res.tau)[0] == 2


def test_find_order_monomial_accepts_identity_first(rng):
    res = find_order(dense_oracle(monomial3()), 3, 1, 1, rng)
    assert res.tau == (0, 1, 2)


def test_iter_paths_enumerates_all_valid_orders():
    full = GoodSetLists(3, [[0], [1, 2, 4], [3, 5, 6]])
    assert sorted(iter_paths(full)) == sorted(itertools.permutations(range(3)))
    chain = GoodSetLists(3, [[0], [2], [6]])
    assert list(iter_paths(chain)) == [(1, 2, 0)]
    broken = GoodSetLists(3, [[0], [1], [6]])
    assert list(iter_paths(broken)) == []


def test_budget_abort_carries_partial_lists(rng):
    R = sample_random_roabp(6, 1, 2, tuple(range(6)), rng)
    with pytest.raises(NoPathFailure) as info:
        find_order(R.oracle(), 6, 1, 2, rng, budget=7)
    e = info.value
    assert e.reason == "budget" and e.lists.tests == 7 and not e.lists.complete
    with pytest.raises(ValueError):
        populate_graph(R.oracle(), 6, 1, 2, rng, budget=3)


def test_min_width_examples(rng):
    assert min_width_search(dense_oracle(monomial3()), 3, 1, rng).claimed_width == 1
    assert min_width_search(dense_oracle(zz()), 4, 1, rng).claimed_width == 2
    k3 = build_gadget_poly(Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)]))
    assert min_width_search(dense_oracle(k3.to_dense()), 3, k3.d, rng).claimed_width == 4


def test_min_width_reports_bracket_on_budget(rng):
    R = sample_random_roabp(6, 1, 3, (5, 3, 1, 0, 2, 4), rng)
    with pytest.raises(NoPathFailure) as info:
        min_width_search(R.oracle(), 6, 1, rng, budget=10)
    assert info.value.reason == "budget"
    lo, hi = info.value.bracket
    assert lo < hi


def test_probabilistic_verification_mode(rng):
    R = sample_random_roabp(5, 2, 2, (3, 0, 4, 1, 2), rng)
    res = find_order(R.oracle(), 5, 2, 2, rng, verify="probabilistic")
    assert res.verification == "probabilistic" and res.per_layer is None
    assert exact_width_in_order(roabp_to_dense(R), res.tau)[0] <= 2
    assert resolve_verification("auto", 20, 2, 2**24) == "probabilistic"
    assert resolve_verification("auto", 5, 2, 2**24) == "exact"
    with pytest.raises(ValueError):
        resolve_verification("sometimes", 3, 1, None)


def test_soundness_of_exact_verification():
    for seed in range(30):
        r = random.Random(seed)
        n = r.randint(3, 6)
        order = list(range(n))
        r.shuffle(order)
        R = sample_random_roabp(n, 2, r.randint(1, 4), order, r)
        w = r.randint(1, 4)
        try:
            res = find_order(R.oracle(), n, 2, w, r)
        except NoPathFailure:
            continue
        assert all(rk <= w for rk in res.per_layer)
        assert exact_width_in_order(roabp_to_dense(R), res.tau)[0] <= w


def test_prefix_chains_of_order_and_reverse_are_good():
    for seed in range(20):
        r = random.Random(100 + seed)
        order = list(range(7))
        r.shuffle(order)
        R = sample_random_roabp(7, 2, 3, order, r)
        lists = populate_graph(R.oracle(), 7, 2, 3, r)
        for chain in (order, order[::-1]):
            for k in range(1, 7):
                assert VarSubset.of(chain[:k], 7).mask in lists.levels[k]


def _instances(seed, count):
    """Mix of generic dense polynomials and low-width ROABP expansions."""
    r = random.Random(seed)
    out = []
    for i in range(count):
        n, d = r.randint(2, 6), r.randint(1, 2)
        if i % 2:
            vals = [r.randrange(BIG.p) if r.random() < 0.7 else 0 for _ in range((d + 1) ** n)]
            out.append(DensePoly(n, d, np.array(vals, dtype=object), BIG))
        else:
            order = list(range(n))
            r.shuffle(order)
            out.append(roabp_to_dense(sample_random_roabp(n, d, r.randint(1, 3), order, r)))
    return out


def test_min_width_matches_brute_force():
    rng = random.Random(9)
    for f in _instances(11, 100):
        best, _ = brute_force_best_order(f)
        res = min_width_search(dense_oracle(f), f.n, f.d, rng, verify="exact")
        assert res.claimed_width == best
        assert exact_width_in_order(f, res.tau)[0] == best


def test_brute_force_examples():
    # prod (x_i + y_i), variables x1, x2, y1, y2
    f = DensePoly.from_terms(4, 1, BIG, [((a, b, 1 - a, 1 - b), 1) for a in (0, 1) for b in (0, 1)])
    width, tau = brute_force_best_order(f)
    assert width == 2 and tau == (0, 2, 1, 3)
    const = DensePoly.from_terms(3, 2, BIG, [((0, 0, 0), 5)])
    assert brute_force_best_order(const) == (1, (0, 1, 2))
    p3 = build_gadget_poly(Graph.from_edges(3, [(0, 1), (1, 2)]))
    assert brute_force_best_order(p3.to_dense())[0] == 3


def test_brute_force_cap():
    with pytest.raises(ValueError):
        brute_force_best_order(DensePoly.zeros(9, 1, BIG))


@given(st.integers(2, 4), st.integers(1, 2), st.randoms(use_true_random=False))
def test_brute_force_agrees_with_reference_enumeration(n, d, r):
    order = list(range(n))
    r.shuffle(order)
    f = roabp_to_dense(sample_random_roabp(n, d, r.randint(1, 3), order, random.Random(r.random())))
    widths = order_widths(f)
    best, tau = brute_force_best_order(f)
    assert best == min(widths.values()) == widths[tau]
    assert tau == min(t for t, w in widths.items() if w == best)
    assert brute_width(f, list(tau), BIG.p) == best


def test_max_possible_width():
    assert max_possible_width(5, 2) == 9
    assert max_possible_width(1, 3) == 1


def test_generic_lists_stay_small_at_n10():
    # random width-3 ROABPs: the middle levels should hold just the two prefix-chain sets
    n, d, w, k = 10, 2, 3, 2
    large = 0
    for seed in range(100):
        rng = random.Random(seed)
        order = list(range(n))
        rng.shuffle(order)
        R = sample_random_roabp(n, d, w, order, rng, BIG)
        sizes = populate_graph(R.oracle(), n, d, w, rng).sizes()
        large += any(sizes[r] > 2 for r in range(k, n - k + 1))
    assert large <= 5
