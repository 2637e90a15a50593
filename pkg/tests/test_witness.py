import itertools
import random

import pytest
from hypothesis import given, strategies as st

from roabp_order.nisan import exact_width_in_order, nisan_rank
from roabp_order.witness import (
    PairSelection,
    WitnessHypothesisError,
    admissible,
    pair_count,
    select_pairs,
    witness_for_id,
    witness_general,
    witness_pairs_for_id,
    witness_pairs_general,
    witness_sparse,
)

from oracles import brute_width, nisan_matrix_by_dict, sympy_rank


def test_pair_count():
    assert [pair_count(1, w) for w in (1, 2, 3, 4, 7, 8)] == [1, 2, 2, 3, 3, 4]
    assert pair_count(2, 3) == 2 and pair_count(2, 8) == 2 and pair_count(2, 9) == 3
    with pytest.raises(WitnessHypothesisError):
        pair_count(0, 3)


def test_identity_example_n4():
    assert witness_pairs_for_id(4, 1, 2, [1, 2]).pairs == ((1, 0), (2, 3))
    f = witness_for_id(4, 1, 2, [1, 2])
    assert set(f.to_sparse().terms) == {((0, 0, 0, 0), 1), ((1, 1, 0, 0), 1), ((0, 0, 1, 1), 1), ((1, 1, 1, 1), 1)}
    width, layers = exact_width_in_order(f, (0, 1, 2, 3))
    assert list(layers) == [2, 1, 2] and width == 2
    assert nisan_rank(f, [1, 2]) == 4


def test_identity_example_n6():
    f = witness_for_id(6, 2, 3, [1, 2])
    assert nisan_rank(f, [1, 2]) == 9
    assert exact_width_in_order(f, range(6))[0] <= 3


def test_identity_rejections():
    with pytest.raises(WitnessHypothesisError) as e:
        witness_for_id(4, 1, 2, [0, 1])
    assert e.value.condition == "prefix"
    with pytest.raises(WitnessHypothesisError) as e:
        witness_for_id(6, 1, 2, [3, 4])
    assert e.value.condition == "left-heavy"
    with pytest.raises(WitnessHypothesisError) as e:
        witness_for_id(6, 1, 2, [1, 2, 3, 4])
    assert e.value.condition == "size"
    with pytest.raises(WitnessHypothesisError) as e:
        witness_for_id(2, 1, 2, [1])
    assert e.value.condition == "n-too-small"
    with pytest.raises(WitnessHypothesisError) as e:
        witness_for_id(4, 2, 2, [1, 2])
    assert e.value.condition == "k-too-small"


def test_general_examples():
    f = witness_general(4, 1, 2, [0, 3])
    assert witness_pairs_general(4, 1, 2, [0, 3]) == ((0, 1), (3, 2))
    assert nisan_rank(f, [0, 3]) == 4
    assert exact_width_in_order(f, range(4))[1] == [2, 1, 2]

    sigma = (1, 0, 2, 3)
    f = witness_general(4, 1, 2, [0, 2], sigma)
    assert exact_width_in_order(f, sigma)[0] <= 2
    assert nisan_rank(f, [0, 2]) == 4

    with pytest.raises(WitnessHypothesisError) as e:
        witness_general(4, 1, 2, [1, 0], sigma)
    assert e.value.condition == "prefix"
    with pytest.raises(WitnessHypothesisError) as e:
        witness_general(4, 1, 2, [3, 2], sigma)
    assert e.value.condition == "prefix"


def test_pair_selection_validation():
    with pytest.raises(ValueError):
        PairSelection(4, ((0, 2), (1, 3)))
    with pytest.raises(ValueError):
        PairSelection(4, ((0, 1), (1, 2)))
    assert PairSelection(4, ((1, 0), (2, 3))).split_by(0b0110) == 2


def random_admissible(rng, max_n=8):
    while True:
        n = rng.randint(4, max_n)
        d = rng.randint(1, 2)
        w = rng.randint(d + 1, (d + 1) ** 2)
        size = rng.randint(1, n - 1)
        T = rng.sample(range(n), size)
        sigma = list(range(n))
        rng.shuffle(sigma)
        if admissible(n, d, w, T, sigma):
            return n, d, w, T, tuple(sigma)


def test_random_admissible_tuples():
    rng = random.Random(99)
    for _ in range(100):
        n, d, w, T, sigma = random_admissible(rng)
        k = pair_count(d, w)
        f = witness_sparse(n, d, w, T, sigma).to_dense()
        assert exact_width_in_order(f, sigma)[0] <= w
        assert nisan_rank(f, T) == (d + 1) ** k > w


def test_witness_against_reference_ranks():
    rng = random.Random(5)
    for _ in range(10):
        n, d, w, T, sigma = random_admissible(rng, max_n=6)
        f = witness_general(n, d, w, T, sigma)
        assert brute_width(f, list(sigma), f.p) <= w
        assert sympy_rank(nisan_matrix_by_dict(f, T), f.p) == (d + 1) ** pair_count(d, w)


@st.composite
def selections(draw):
    n = draw(st.integers(4, 12))
    k = draw(st.integers(2, n // 2))
    size = draw(st.integers(2, n - 2))
    T = draw(st.sets(st.integers(0, n - 1), min_size=size, max_size=size))
    outside = set(range(n)) - T
    prefix = lambda S: sorted(S) == list(range(len(S)))
    if min(len(T), len(outside)) < k or prefix(T) or prefix(outside):
        return None
    return select_pairs(n, k, sorted(T))


@given(selections())
def test_identity_prefixes_split_fewer_than_k_pairs(sel):
    if sel is None:
        return
    for i in range(sel.n + 1):
        assert sel.split_by((1 << i) - 1) <= sel.k - 1


def test_admissible_count_matches_rejections():
    # every tuple is either constructible or raises a typed rejection
    for T in itertools.combinations(range(5), 2):
        for sigma in itertools.permutations(range(5)):
            try:
                witness_pairs_general(5, 1, 2, T, sigma)
            except WitnessHypothesisError as e:
                assert e.condition == "prefix"
