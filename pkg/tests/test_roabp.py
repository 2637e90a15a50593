import random

import pytest
from hypothesis import given, strategies as st

from roabp_order.ffield import PrimeField
from roabp_order.nisan import exact_width_in_order, nisan_rank
from roabp_order.poly import ExpansionBudgetError, PolyFormatError, dense_eval
from roabp_order.roabp import (
    Roabp,
    check_order,
    format_roabp,
    parse_roabp,
    roabp_eval,
    roabp_from_matrices,
    roabp_matrix_product,
    roabp_to_dense,
    sample_random_roabp,
)

F7 = PrimeField(7)
BIG = PrimeField()


def scalar_roabp():
    return Roabp(1, 1, (0,), (1, 1), ((((3,),), ((5,),)),), F7)


def sum_product_roabp(field=BIG):
    # (x1 + x2)(x3 + x4) in order 1,2,3,4 with widths 1,2,1,2,1
    # odd positions emit the row vector [1, x], even positions the column [x, 1]
    layers = (
        (((1, 0),), ((0, 1),)),
        (((0,), (1,)), ((1,), (0,))),
        (((1, 0),), ((0, 1),)),
        (((0,), (1,)), ((1,), (0,))),
    )
    return Roabp(4, 1, (0, 1, 2, 3), (1, 2, 1, 2, 1), layers, field)


def test_scalar_example():
    R = scalar_roabp()
    assert roabp_eval(R, [2]) == 6
    assert list(roabp_to_dense(R).coeffs) == [3, 5]


def test_zero_layers_give_zero():
    R = roabp_from_matrices((1, 0, 2), 2, [[((0, 0),)] * 3, [((0, 0), (0, 0))] * 3, [((0,), (0,))] * 3], BIG)
    assert R.widths == (1, 2, 2, 1)
    rng = random.Random(0)
    assert all(R(BIG.sample(rng, 3)) == 0 for _ in range(20))


def test_hand_built_sum_product():
    R = sum_product_roabp()
    assert R([1, 1, 1, 1]) == 4
    f = roabp_to_dense(R)
    assert f.nonzero_count() == 4
    assert f.coeff((1, 0, 1, 0)) == f.coeff((0, 1, 0, 1)) == 1
    rng = random.Random(1)
    for _ in range(20):
        pt = BIG.sample(rng, 4)
        assert R(pt) == (pt[0] + pt[1]) * (pt[2] + pt[3]) % BIG.p
    assert R.width == 2


def test_width_one_product():
    layer = (((1,),), ((1,),))
    R = Roabp(2, 1, (0, 1), (1, 1, 1), (layer, layer), BIG)
    assert list(roabp_to_dense(R).coeffs) == [1, 1, 1, 1]


def test_shape_chain_enforced():
    with pytest.raises(ValueError, match="shape chain"):
        Roabp(2, 0, (0, 1), (1, 2, 1), ((((1, 0),),), (((1, 1),),)), BIG)
    with pytest.raises(ValueError):
        Roabp(2, 0, (0, 1), (2, 2, 1), ((((1, 0),),), (((1,), (1,)),)), BIG)
    with pytest.raises(ValueError):
        check_order((0, 0, 1), 3)


def test_point_dimension_checked():
    with pytest.raises(ValueError):
        roabp_eval(sum_product_roabp(), [1, 2])


def test_sampling_shapes_and_determinism():
    R1 = sample_random_roabp(5, 2, 3, (2, 0, 3, 1, 4), random.Random(7))
    R2 = sample_random_roabp(5, 2, 3, (2, 0, 3, 1, 4), random.Random(7))
    assert R1 == R2
    assert R1.widths == (1, 3, 3, 3, 3, 1)
    assert all(len(m) == 1 for m in R1.layers[0]) and all(len(m[0]) == 1 for m in R1.layers[-1])


def test_width_one_sample_factors_into_univariates():
    R = sample_random_roabp(4, 2, 1, (3, 1, 0, 2), random.Random(8))
    f = roabp_to_dense(R)
    for T in range(1, 15):
        assert nisan_rank(f, T) <= 1


def test_random_width_three_is_narrow_in_its_order():
    for seed in range(50):
        R = sample_random_roabp(6, 2, 3, tuple(range(6)), random.Random(seed))
        width, _ = exact_width_in_order(roabp_to_dense(R), range(6))
        assert width <= 3


def test_dense_matches_eval_on_many_points():
    rng = random.Random(9)
    R = sample_random_roabp(4, 1, 2, (1, 3, 0, 2), rng)
    f = roabp_to_dense(R)
    for _ in range(1000):
        pt = BIG.sample(rng, 4)
        assert dense_eval(f, pt) == roabp_eval(R, pt)


def test_coefficients_are_matrix_product_entries():
    rng = random.Random(10)
    R = sample_random_roabp(5, 2, 3, (4, 2, 0, 1, 3), rng)
    f = roabp_to_dense(R)
    for _ in range(10):
        exps = [rng.randint(0, 2) for _ in range(5)]
        assert f.coeff(exps) == roabp_matrix_product(R, exps)


@given(st.integers(1, 5), st.integers(0, 2), st.integers(1, 3), st.randoms(use_true_random=False))
def test_width_soundness(n, d, w, r):
    order = list(range(n))
    r.shuffle(order)
    R = sample_random_roabp(n, d, w, order, random.Random(r.random()))
    width, per_layer = exact_width_in_order(roabp_to_dense(R), R.order)
    assert width <= R.width
    assert all(rk <= wi for rk, wi in zip(per_layer, R.widths[1:-1]))


def test_expansion_budget():
    R = sample_random_roabp(8, 2, 2, tuple(range(8)), random.Random(0))
    with pytest.raises(ExpansionBudgetError):
        roabp_to_dense(R, budget=3**8 - 1)


def test_oracle_provenance_and_expansion():
    R = sample_random_roabp(3, 2, 2, (2, 1, 0), random.Random(11))
    o = R.oracle()
    assert o.provenance == "roabp-backed"
    assert o.to_dense() == roabp_to_dense(R)


def test_text_format_round_trip():
    R = sample_random_roabp(4, 2, 3, (3, 1, 0, 2), random.Random(12))
    text = format_roabp(R)
    assert text.splitlines()[1] == "order 4 2 1 3"
    assert parse_roabp(text) == R


@pytest.mark.parametrize("mutate", [
    lambda t: t.replace("roabp", "poly", 1),
    lambda t: "\n".join(t.splitlines()[:-1]),
    lambda t: t.replace("order 4 2 1 3", "order 4 2 1"),
    lambda t: t.replace("layer 1 0", "layer 9 0"),
    lambda t: t.replace("widths 1 3 3 3 1", "widths 1 3 2 3 1"),
])
def test_malformed_roabp_files(mutate):
    R = sample_random_roabp(4, 2, 3, (3, 1, 0, 2), random.Random(12))
    with pytest.raises(PolyFormatError):
        parse_roabp(mutate(format_roabp(R)))
