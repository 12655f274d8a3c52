import random

import pytest

from rollup_da.algebra import PrimeField, DuplicateXError, EmptyPointsError

F101 = PrimeField(101)


def test_interpolate_single_point_is_constant():
    assert F101.interpolate([(0, 2)]) == [2]


def test_interpolate_two_points_hand_checked():
    # y = 3x + 2 passes through (0,2) and (1,5): solved as a 2x2 system
    phi = F101.interpolate([(0, 2), (1, 5)])
    assert phi == [2, 3]
    assert F101.poly_eval(phi, 0) == 2
    assert F101.poly_eval(phi, 1) == 5


def test_interpolate_three_random_points_hits_all_nodes():
    rng = random.Random(42)
    for _ in range(20):
        ys = [rng.randrange(101) for _ in range(3)]
        phi = F101.interpolate(list(enumerate(ys)))
        assert len(phi) <= 3
        for j, y in enumerate(ys):
            assert F101.poly_eval(phi, j) == y


def test_interpolate_rejects_duplicate_nodes():
    with pytest.raises(DuplicateXError):
        F101.interpolate([(1, 2), (1, 3)])
    # congruent nodes collide too
    with pytest.raises(DuplicateXError):
        F101.interpolate([(1, 2), (102, 3)])


def test_interpolate_rejects_empty():
    with pytest.raises(EmptyPointsError):
        F101.interpolate([])


def test_poly_eval_cases():
    assert F101.poly_eval([2, 3], 0) == 2
    assert F101.poly_eval([2, 3], 2) == 8
    assert F101.poly_eval([], 17) == 0


def test_poly_div_linear_hand_checked():
    # 3x + 2 = 3 (x - 2) + 8
    assert F101.poly_div_linear([2, 3], 2) == [3]
    assert F101.poly_eval([2, 3], 2) == 8


def test_poly_div_linear_constant_gives_zero():
    assert F101.poly_div_linear([7], 5) == []
    assert F101.poly_div_linear([], 5) == []


def test_poly_div_linear_multiply_add_oracle():
    rng = random.Random(7)
    for _ in range(50):
        phi = [rng.randrange(101) for _ in range(6)]
        phi = F101.poly_trim(phi)
        i = rng.randrange(101)
        q = F101.poly_div_linear(phi, i)
        rebuilt = F101.poly_add(F101.poly_mul(q, [-i % 101, 1]),
                                [F101.poly_eval(phi, i)])
        assert rebuilt == phi


def test_interpolate_eval_identity_property():
    rng = random.Random(9)
    for _ in range(30):
        k = rng.randrange(1, 8)
        xs = rng.sample(range(101), k)
        ys = [rng.randrange(101) for _ in range(k)]
        phi = F101.interpolate(list(zip(xs, ys)))
        for x, y in zip(xs, ys):
            assert F101.poly_eval(phi, x) == y


def test_trim_makes_equality_structural():
    assert F101.poly_trim([2, 3, 0, 0]) == [2, 3]
    assert F101.poly_trim([0, 0]) == []
    assert F101.poly_trim([2, 3, 101]) == [2, 3]


def test_toy_backend_bilinearity_exhaustive(toy101):
    g = toy101.generator()
    e_gg = toy101.pairing(g, g)
    for a in range(101):
        for b in range(101):
            lhs = toy101.pairing(toy101.mul(g, a), toy101.mul(g, b))
            assert lhs == toy101.gt_pow(e_gg, a * b)


def test_toy_backend_group_laws(toy):
    g = toy.generator()
    rng = random.Random(3)
    for _ in range(100):
        a, b = rng.randrange(toy.order), rng.randrange(toy.order)
        x, y = toy.mul(g, a), toy.mul(g, b)
        assert toy.add(x, toy.identity()) == x
        assert toy.add(x, y) == toy.add(y, x)
        assert toy.mul(x, 0) == toy.identity()
        assert toy.add(x, toy.neg(x)) == toy.identity()
        # scalar mul distributes over scalar addition
        assert toy.add(toy.mul(g, a), toy.mul(g, b)) == toy.mul(g, a + b)


def test_toy_element_serialization(toy):
    for e in (0, 1, toy.order - 1):
        assert toy.element_from_bytes(toy.element_to_bytes(e)) == e
    with pytest.raises(ValueError):
        toy.element_from_bytes(b"\xff\xff\xff\xff")
    with pytest.raises(ValueError):
        toy.element_from_bytes(b"\x00")
