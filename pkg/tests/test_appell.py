from fractions import Fraction

import mpmath
import pytest

import oracles
from qstring.appell import (
    APPELL_PROPERTIES,
    appell_h,
    appell_h_regular,
    appell_m,
    appell_pole,
    appell_pole_index,
    verify_appell_property,
)
from qstring.errors import NonGenericParameters, PoleAtLatticePoint
from qstring.series import Monomial
from qstring.verify import parse_monomial

QV = mpmath.mpf(1) / 25


@pytest.mark.parametrize("x,zz,qmod", [
    ("-q^1/2", "-q^1/3", 1),
    ("q^1/3", "-q^1/2", 1),
    ("-q^5/2", "q^-1/4", 1),
    ("q^-2/3", "-1", 2),
    ("-q", "q^1/2", 3),
])
def test_m_matches_numerical_bilateral_sum(x, zz, qmod):
    xm, zm = parse_monomial(x), parse_monomial(zz)
    series = appell_m(xm, zm, qmod, 50)
    xv = oracles.mono_value(xm.sign, xm.qexp, QV)
    zv = oracles.mono_value(zm.sign, zm.qexp, QV)
    want = oracles.appell_numeric(xv, zv, QV, qmod)
    assert abs(oracles.evaluate(series, QV) - want) < mpmath.mpf(10) ** -45


def test_pole_detection():
    assert appell_pole(Monomial(1, 2), Monomial(1, -1), 1)
    assert not appell_pole(Monomial(-1, 2), Monomial(1, -1), 1)
    assert appell_pole_index(Monomial(1, 2), Monomial(1, -1), 1) == 0
    with pytest.raises(PoleAtLatticePoint):
        appell_m(Monomial(1, Fraction(1, 2)), Monomial(1, Fraction(1, 2)), 1, 10)


def test_m_undefined_where_theta_vanishes():
    with pytest.raises(NonGenericParameters):
        appell_m(Monomial(-1, 1), Monomial(1, 2), 1, 10)


def test_regular_part_differs_from_full_sum_by_one_summand():
    x, zz = Monomial(-1, Fraction(1, 2)), Monomial(-1, Fraction(1, 3))
    full = appell_h(x, zz, 1, 30)
    assert appell_h_regular(x, zz, 1, 30).first_mismatch(full, 30) is None


@pytest.mark.parametrize("prop", sorted(APPELL_PROPERTIES))
def test_property_at_default_point(prop):
    res = verify_appell_property(prop, {}, 60)
    assert res.status == "pass", res.to_json()


@pytest.mark.parametrize("params", [
    {"x": "-q", "z": "-q^2/3", "zprime": "q^3/5", "n": 2},
    {"x": "-q^1/3", "z": "-q^1/2", "zprime": "-q^1/7", "n": 3},
    {"x": "q^1/4", "z": "-q^1/2", "zprime": "-q^1/2", "n": 1},
])
def test_m_split(params):
    assert verify_appell_property("m-split", params, 50).status == "pass"


def test_m_split_at_a_theta_zero_is_skipped():
    res = verify_appell_property("m-split", {"x": "-q", "z": "q^2", "zprime": "q^3", "n": 2}, 80)
    assert res.status == "skipped-nongeneric"


def test_changing_z_against_direct_evaluation():
    res = verify_appell_property("changing-z", {"x": "q^1/5", "z": "-q^1/2", "z1": "-q^3/4"}, 60)
    assert res.status == "pass"


def test_wrong_x_shift_sign_is_detected():
    x, zz = Monomial(-1, Fraction(1, 2)), Monomial(-1, Fraction(1, 3))
    lhs = appell_m(Monomial(1, 1) * x, zz, 1, 30)
    bad = 1 + appell_m(x, zz, 1, 30) * x
    assert lhs.first_mismatch(bad, 29) is not None
