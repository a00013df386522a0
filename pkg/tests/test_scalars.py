import pytest
from fractions import Fraction
from gmpy2 import mpq
from hypothesis import given, strategies as st

from bethe_forge.errors import Singular
from bethe_forge.scalars import (Params, RapiditySet, RationalSampler, eval_structure_fn, f_fn, format_rational,
                                 g_fn, h_fn, h_tilde_fn, k_fn, parse_rational, product_F, rational)

rationals = st.fractions(max_denominator=50).map(lambda f: mpq(f.numerator, f.denominator))


def test_structure_function_values():
    p2 = Params(2, mpq(1))
    assert eval_structure_fn("f", p2, mpq(3), mpq(1)) == mpq(3, 2)
    assert eval_structure_fn("h", p2, mpq(0), mpq(0)) == 1
    with pytest.raises(Singular):
        eval_structure_fn("g", p2, mpq(2), mpq(2))
    with pytest.raises(Singular):
        eval_structure_fn("k", Params(2, mpq(-1)), mpq(2), mpq(1))


def test_h_tilde_uses_level_rank():
    p = Params(3, mpq(1, 2))
    assert h_tilde_fn(p, 2, mpq(1), mpq(0)) == 1 / (mpq(1) + 2 - mpq(1, 2))
    assert h_tilde_fn(p, 3, mpq(1), mpq(0)) == h_fn(p, mpq(1), mpq(0))
    with pytest.raises(ValueError):
        eval_structure_fn("h_tilde", p, mpq(1), mpq(0), m=4)


def test_product_F_orientation():
    assert product_F(mpq(7), (), "left") == 1
    assert product_F(mpq(3), (mpq(1), mpq(2)), "left") == 3
    assert product_F(mpq(3), (mpq(1), mpq(2)), "right") == 0


@given(rationals, rationals)
def test_f_is_one_plus_g(x, y):
    if x == y:
        return
    assert f_fn(x, y) == 1 + g_fn(x, y)


@given(rationals, rationals, st.sampled_from([mpq(1), mpq(-1), mpq(1, 2)]))
def test_k_and_h_are_reciprocal_shifts(x, y, eta):
    p = Params(2, eta)
    try:
        assert 1 / k_fn(p, x, y) == x - y + eta
        assert 1 / h_fn(p, x, y) == x - y + 2 - eta
    except Singular:
        pass


@given(st.fractions(max_denominator=10**6))
def test_rational_roundtrip(fr):
    x = mpq(fr.numerator, fr.denominator)
    assert parse_rational(format_rational(x)) == x


def test_rational_rejects_floats():
    with pytest.raises(TypeError):
        rational(0.5)
    assert rational("3/6") == mpq(1, 2)
    assert rational(Fraction(2, 4)) == mpq(1, 2)
    with pytest.raises(ValueError):
        parse_rational("1/0")


def test_sampler_is_deterministic():
    a = RationalSampler(3).draw_many(5)
    b = RationalSampler(3).draw_many(5)
    assert a == b and len(set(a)) == 5


def test_rapidity_set_without():
    s = RapiditySet([mpq(1), mpq(2), mpq(3)])
    assert tuple(s.without(1)) == (mpq(1), mpq(3))
