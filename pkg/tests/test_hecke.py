from fractions import Fraction

import pytest

import oracles
from qstring.errors import UnboundedRegion
from qstring.hecke import (
    hecke_f,
    m_abc,
    signed_range,
    verify_functional_equation,
    verify_pos_disc,
)
from qstring.series import Monomial


def test_constant_term_is_one():
    # negative-cone exponents start at a+b+c-1-2 = 1 for x = q, y = -q^2
    f = hecke_f(1, 2, 1, Monomial(1, 1), Monomial(-1, 2), 20)
    assert f.coefficient(0) == 1


def test_leading_negative_cone_term():
    # (r, s) = (-1, -1) contributes -x^-1 y^-1 q^(a+b+c), here -q^2, and
    # nothing from the positive cone lands on q^2
    f = hecke_f(1, 2, 1, Monomial(1, 1), Monomial(1, 1), 10)
    assert f.coefficient(2) == -1


@pytest.mark.parametrize("abc,x,y", [
    ((1, 5, 20), (1, 1), (-1, 10)),
    ((1, 2, 1), (1, 2), (-1, 3)),
    ((2, 3, 1), (-1, 1), (1, 2)),
    ((1, 7, 42), (1, 3), (-1, 60)),
])
def test_double_sum_matches_box_scan(abc, x, y):
    N = 30
    a, b, c = abc
    got = hecke_f(a, b, c, Monomial(x[0], x[1]), Monomial(y[0], y[1]), N)
    want = oracles.hecke_box(a, b, c, x[0], x[1], y[0], y[1], N, 40)
    assert dict(got.items()) == {e: v for e, v in want.items() if v}


def test_region_must_be_bounded():
    with pytest.raises(UnboundedRegion):
        hecke_f(0, 1, 1, Monomial(1, 1), Monomial(1, 1), 10)


def test_signed_range_convention():
    assert signed_range(0, 2) == (1, range(0, 3))
    # sum_{r=0}^{-3} = -sum_{r=-2}^{-1}
    assert signed_range(0, -3) == (-1, range(-2, 0))
    assert signed_range(0, -1) == (-1, range(0, 0))


@pytest.mark.parametrize("ell,k", [(0, 0), (1, 0), (0, 1), (-2, 1), (2, -1), (-3, -3), (3, 2)])
def test_functional_equation(ell, k):
    res = verify_functional_equation(1, 3, 2, "q^1/2", "-q^2/3", ell, k, 40)
    assert res.status == "pass", res.to_json()


def test_functional_equation_shift_used_for_quasi_periodicity():
    # (l, k) = (-2p, 1) with the (p, j) = (2, 1) coefficients a=1, b=p'=5, c=2pp'=20
    res = verify_functional_equation(1, 5, 20, "q^2", "-q^12", -4, 1, 40)
    assert res.status == "pass"


@pytest.mark.parametrize("abc,x,y", [
    ((1, 2, 1), "q^3/2", "-q^5/2"),
    ((1, 3, 2), "-q^1/3", "q^5/4"),
    ((2, 3, 1), "q^2/3", "-q^1/2"),
])
def test_positive_discriminant_expansion(abc, x, y):
    res = verify_pos_disc(*abc, x, y, 40)
    assert res.status == "pass", res.to_json()


def test_positive_discriminant_degenerate_draw_is_skipped():
    res = verify_pos_disc(1, 2, 1, "q^0", "-q", 20)
    assert res.status == "skipped-nongeneric"


def test_appell_part_symmetry_under_swapping_roles():
    x, y = Monomial(-1, Fraction(1, 3)), Monomial(1, Fraction(3, 4))
    z = Monomial(-1, 0)
    one = m_abc(1, 3, 2, x, y, z, z, 30)
    two = m_abc(2, 3, 1, y, x, z, z, 30)
    assert one.first_mismatch(two, 30) is None
