import mpmath
import pytest

import oracles
from qstring import mock
from qstring.verify import parse_monomial

N = 40

# Eulerian coefficients frozen from the list-arithmetic oracle in tests/oracles.py.
FROZEN = {
    "f3": [1, 1, -2, 3, -3, 3, -5, 7, -6, 6, -10, 12, -11, 13, -17, 20, -21, 21, -27, 34],
    "omega3": [1, 2, 3, 4, 6, 8, 10, 14, 18, 22, 29, 36, 44, 56, 68],
    "f0": [1, 1, -1, 1, 0, 0, -1, 1, 0, 1, -2, 1, -1, 2, -2],
    "f1": [1, 0, 1, -1, 1, -1, 2, -2, 1, -1, 2, -2, 2, -2, 2],
    "phi10": [1, 2, 2, 3, 4, 4, 6, 7, 8, 10, 12, 14, 16, 20, 22],
}


@pytest.mark.parametrize("name", list(FROZEN))
def test_eulerian_frozen_values(name):
    want = FROZEN[name]
    got = mock.eulerian(name, len(want))
    assert [got.coefficient(n) for n in range(len(want))] == want


@pytest.mark.parametrize("name", list(FROZEN))
def test_eulerian_against_live_oracle(name):
    got = mock.eulerian(name, N)
    assert [got.coefficient(n) for n in range(N)] == getattr(oracles, name)(N)


@pytest.mark.parametrize("x,qmod", [("q^1/2", 1), ("-q^1/3", 1), ("q^3/2", 2)])
def test_universal_function_numerically(x, qmod):
    xm = parse_monomial(x)
    qv = mpmath.mpf(1) / 25
    Q = qv ** qmod
    xv = oracles.mono_value(xm.sign, xm.qexp, qv)
    total = mpmath.mpf(0)
    for n in range(40):
        den = mpmath.mpf(1)
        for k in range(n + 1):
            den *= 1 - xv * Q ** k
        for k in range(1, n + 1):
            den *= 1 - Q ** k / xv
        total += Q ** (n * n) / den
    want = (total - 1) / xv
    got = mock.g_universal(xm, qmod, 40)
    assert abs(oracles.evaluate(got, qv) - want) < mpmath.mpf(10) ** -40


@pytest.mark.parametrize("name", list(mock.APPELL_FORMS))
def test_appell_forms(name):
    res = mock.verify_appell_form(name, 80)
    assert res.status == "pass", res.to_json()


@pytest.mark.parametrize("x,qmod", [("q^1/2", 1), ("-q^1/3", 1), ("q^1/4", 2)])
def test_universal_function_appell_form(x, qmod):
    assert mock.verify_appell_form("g", 50, x, qmod).status == "pass"


@pytest.mark.parametrize("x", ["q^2", "q^4"])
def test_universal_function_at_non_generic_point(x):
    assert mock.verify_appell_form("g", 30, x, 1).status == "skipped-nongeneric"


@pytest.mark.parametrize("name", list(mock.ALTERNATE_FORMS))
def test_alternate_forms(name):
    assert mock.verify_alternate_form(name, 80).status == "pass"


@pytest.mark.parametrize("name", list(mock.MOCK_CONJECTURES))
def test_fifth_order_conjectures(name):
    assert mock.verify_mock_theta_conjecture(name, 80).status == "pass"


@pytest.mark.parametrize("name", list(mock.TENTH_ORDER))
def test_tenth_order_dissections(name):
    assert mock.verify_tenth_order_dissection(name, 80).status == "pass"


@pytest.mark.parametrize("family", list(mock.MASTER_THETA))
def test_master_theta_families(family):
    for r in mock.MASTER_RANGES[family]:
        res = mock.verify_master_theta_family(family, r, 80)
        assert res.status == "pass", res.to_json()


def test_sign_tables():
    assert mock.KAPPA == {0: 0, 1: 0, 2: 1, 3: 1}
    assert mock.DELTA == {0: 0, 1: 1, 2: 1, 3: 0}
    assert mock.FLOOR_HALF_R_PLUS_1 == {r: (r + 1) // 2 for r in range(4)}


@pytest.mark.parametrize("table,family", [("DELTA", "pP38m0"), ("KAPPA", "pP38m2")])
def test_flipped_sign_entry_is_detected(monkeypatch, table, family):
    flipped = dict(getattr(mock, table))
    flipped[2] = 1 - flipped[2]
    monkeypatch.setattr(mock, table, flipped)
    res = mock.verify_master_theta_family(family, 2, 60)
    assert res.status == "fail"
    assert res.first_mismatch is not None


def test_at_power_with_twist():
    base = mock.at_power(mock.f3, 2, 20, twist=True)
    f = mock.f3(10)
    for n in range(10):
        assert base.coefficient(2 * n) == (-1) ** n * f.coefficient(n)
        assert base.coefficient(2 * n + 1) == 0
