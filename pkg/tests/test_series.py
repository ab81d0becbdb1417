from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qstring import (
    BiSeries,
    FractionalTwist,
    Monomial,
    ScaledSeries,
    ZeroLeadingCoefficient,
    bi_mul,
    dissect,
    invert,
    q,
    sign_twist,
    specialize_z,
    substitute_power,
    z,
)
from qstring.series import INF


def S(terms, order=INF):
    return ScaledSeries.from_terms(terms, order)


def test_scale_is_reduced_to_lowest_terms():
    s = ScaledSeries({2: 1, 4: 3}, 2, 8)
    assert s.scale == 1 and s.valid_below == 4
    assert s.coefficient(1) == 1 and s.coefficient(2) == 3


def test_fractional_exponents_add_exactly():
    a = S({Fraction(1, 2): 1}, 10)
    b = S({Fraction(1, 3): 2}, 10)
    total = a + b
    assert total.scale == 6
    assert dict(total.items()) == {Fraction(1, 3): 2, Fraction(1, 2): 1}


def test_product_validity_tracks_both_lead_exponents():
    a = S({-1: 1, 0: 1}, 5)
    b = S({2: 1}, 4)
    prod = a * b
    # a is known below 5 and b starts at q^2; b below 4 and a starts at q^-1
    assert prod.order == 3


def test_truncated_geometric_inverse():
    one_minus_q = S({0: 1, 1: -1}, 30)
    inv = invert(one_minus_q)
    assert [inv.coefficient(n) for n in range(30)] == [1] * 30
    assert inv.order == 30


def test_invert_rejects_zero_series():
    with pytest.raises(ZeroLeadingCoefficient):
        invert(ScaledSeries.zero(10))


def test_canonical_text_round_trip():
    s = S({Fraction(-1, 3): Fraction(5, 7), 2: -3}, 6)
    text = s.to_text()
    assert text == "scale=3; valid_below=18; terms=[(-1, 5/7), (6, -3)]"
    assert ScaledSeries.from_text(text) == s


def test_substitute_power_lands_in_one_residue_class():
    s = S({0: 1, 1: 2, 2: 3, 3: 4}, 4)
    up = substitute_power(s, 3)
    assert up.order == 12
    assert dict(up.items()) == {0: 1, 3: 2, 6: 3, 9: 4}
    assert dissect(up, 3, 0) == up
    assert dissect(up, 3, 1).is_zero()


def test_sign_twist_needs_integral_exponents():
    assert sign_twist(S({1: 1, 2: 1}, 5)) == S({1: -1, 2: 1}, 5)
    with pytest.raises(FractionalTwist):
        sign_twist(S({Fraction(1, 2): 1}, 5))


def test_first_mismatch_reports_exponent_and_values():
    a = S({0: 1, 3: 2}, 10)
    b = S({0: 1, 3: 5}, 10)
    assert a.first_mismatch(b, 10) == (3, 2, 5)
    assert a.first_mismatch(a, 10) is None


def test_bivariate_product_and_specialization():
    a = BiSeries.monomial(Monomial(1, 0, 1)) + BiSeries.monomial(Monomial(1, 1, -1))
    b = BiSeries.monomial(Monomial(1, 0, 1))
    prod = bi_mul(a, b)
    at = specialize_z(prod, Monomial(-1, Fraction(1, 2)))
    # (z + q/z) z at z = -q^(1/2) gives q + q
    assert dict(at.items()) == {1: 2}


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=1, max_size=8),
       st.lists(st.integers(-5, 5), min_size=1, max_size=8),
       st.lists(st.integers(-5, 5), min_size=1, max_size=8))
def test_multiplication_is_associative_and_commutative(a, b, c):
    order = 12
    A = ScaledSeries(dict(enumerate(a)), 1, order)
    B = ScaledSeries(dict(enumerate(b)), 1, order)
    C = ScaledSeries(dict(enumerate(c)), 1, order)
    assert A * B == B * A
    assert (A * B) * C == A * (B * C)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=1, max_size=10), st.integers(1, 4))
def test_inverse_times_series_is_one(tail, d):
    order = 15
    A = ScaledSeries({0: 1, **{k + 1: v for k, v in enumerate(tail)}}, d, order * d)
    prod = A * invert(A)
    assert prod.first_mismatch(ScaledSeries.one(), prod.order) is None


def test_monomial_arithmetic():
    m = -q(Fraction(1, 2)) * z(1)
    assert m ** 2 == Monomial(1, 1, 2)
    assert (m / m).is_scalar and (m / m).qexp == 0
