from fractions import Fraction

import mpmath
import pytest

import oracles
from qstring.errors import PoleAtLatticePoint
from qstring.series import Monomial, ScaledSeries
from qstring.theta import (
    THETA_IDENTITIES,
    J,
    Jm,
    eta,
    j_product,
    j_sum,
    geometric,
    partial_fraction_sum,
    pochhammer,
    verify_theta_identity,
)
from qstring.verify import parse_monomial

N = 40


def coeffs(s, n=N):
    return [s.coefficient(k) for k in range(n)]


def test_euler_product_matches_pentagonal_oracle():
    assert coeffs(Jm(1, N)) == oracles.pentagonal(N)
    assert coeffs(Jm(1, N)) == oracles.qpoch_inf(N)


def test_finite_pochhammer_matches_list_product():
    got = pochhammer(Monomial(-1, 1), 1, 5, N)  # (-q; q)_5
    want = oracles.product([oracles.binomial(1, k, N) for k in range(1, 6)], N)
    assert coeffs(got) == want


@pytest.mark.parametrize("x", ["q^1/3", "-q^5/2", "-1", "q^-7/4", "-q^2/3"])
def test_triple_product_sum_matches_numerical_product(x):
    # j(x; q) evaluated at q = 1/20 from the truncated sum against the infinite product
    mono = parse_monomial(x)
    qv = mpmath.mpf(1) / 20
    series = j_sum(mono, 1, 60)
    xv = oracles.mono_value(mono.sign, mono.qexp, qv)
    assert abs(oracles.evaluate(series, qv) - oracles.j_numeric(xv, qv)) < mpmath.mpf(10) ** -40


def test_product_and_sum_forms_agree_exactly():
    x = Monomial(-1, Fraction(1, 3))
    assert j_product(x, 2, 60).first_mismatch(j_sum(x, 2, 60), 60) is None


def test_theta_vanishes_on_the_lattice():
    assert j_sum(Monomial(1, 3), 1, 50).is_zero()
    assert j_sum(Monomial(1, 4), 2, 50).is_zero()


def test_eta_has_fractional_lead():
    e = eta(1, 10)
    assert e.min_exp == Fraction(1, 24)
    assert e.coefficient(Fraction(1, 24) + 1) == -1


def test_J_notation():
    # J_{1,3} = (q;q^3)(q^2;q^3)(q^3;q^3)
    want = oracles.product([oracles.binomial(-1, k, N) for k in range(1, N)], N)
    assert coeffs(J(1, 3, N)) == want


IDENTITY_CASES = [
    ("jtp", {"x": "-q^1/3", "M": 2}),
    ("j-elliptic", {"x": "q^1/2", "n": -2}),
    ("j-elliptic", {"x": "-q^3/4", "n": 3}),
    ("j-flip-q", {"x": "-q^2/5"}),
    ("j-flip-inv", {"x": "q^7/3"}),
    ("j-multisection", {"x": "-q^1/2", "n": 3}),
    ("j-neg-base", {"x": "q^1/3"}),
    ("j-power", {"x": "-q^1/4", "n": 2}),
    ("j-power", {"x": "q^2/3", "n": 3}),
    ("jsplit", {"z": "-q^1/3", "m": 3}),
    ("jsplit-m2", {"z": "q^1/5"}),
    ("quintuple", {"x": "-q^1/6"}),
    ("quintuple-ratio", {"x": "q^1/4"}),
    ("reciprocal", {"z": "-q^1/2"}),
    ("h1-thm1.1", {"x": "q^1/3", "y": "-q^1/4"}),
    ("h1-thm1.2a", {"x": "-q^2/3", "y": "q^1/6"}),
    ("h1-thm1.2b", {"x": "q^1/2", "y": "q^-1/3"}),
    ("theta-to-j", {"n": 1, "m": 3}),
    ("eta-pentagonal", {}),
] + [(name, {}) for name in THETA_IDENTITIES if name.startswith("rearrange")]


@pytest.mark.parametrize("identity_id,params", IDENTITY_CASES,
                         ids=[f"{i}-{n}" for n, (i, _) in enumerate(IDENTITY_CASES)])
def test_catalogued_identity_holds(identity_id, params):
    res = verify_theta_identity(identity_id, params, 60)
    assert res.status == "pass", res.to_json()


def test_reciprocal_sum_at_a_zero_of_theta_is_non_generic():
    res = verify_theta_identity("reciprocal", {"z": "q^2"}, 30)
    assert res.status == "skipped-nongeneric"


def test_perturbed_identity_is_caught():
    # a wrong sign in the second term of the two-term theta product split
    x, y = Monomial(1, Fraction(1, 3)), Monomial(-1, Fraction(1, 4))
    lhs = j_sum(x, 1, 30) * j_sum(y, 1, 30)
    bad = (j_sum(-x * y, 2, 30) * j_sum(-Monomial(1, 1) * y / x, 2, 30)
           + j_sum(-Monomial(1, 1) * x * y, 2, 30) * j_sum(-(y / x), 2, 30) * x)
    assert lhs.first_mismatch(bad, 30) is not None


def test_geometric_expansion_direction_and_half_weight():
    # 1 / (1 - u): u = -1 gives exactly 1/2; a negative exponent expands in 1/u
    assert geometric(Monomial(-1, 0), 5) == ScaledSeries({0: Fraction(1, 2)})
    inv = geometric(Monomial(1, -2), 7)
    assert dict(inv.items()) == {2: -1, 4: -1, 6: -1}
    with pytest.raises(PoleAtLatticePoint):
        geometric(Monomial(1, 0), 5)


def test_partial_fraction_sum_reproduces_appell_numerator():
    # sum_n (-1)^n q^C(n+1,2) / (1 - q^n z) at z = -q^(1/2), checked numerically
    zz = Monomial(-1, Fraction(1, 2))
    s = partial_fraction_sum(lambda n: (Monomial(-1 if n % 2 else 1, n * (n + 1) // 2),
                                        Monomial(1, n) * zz), 40)
    qv = mpmath.mpf(1) / 30
    zv = -mpmath.sqrt(qv)
    want = mpmath.fsum((-1) ** n * qv ** (n * (n + 1) // 2) / (1 - qv ** n * zv)
                       for n in range(-60, 61))
    assert abs(oracles.evaluate(s, qv) - want) < mpmath.mpf(10) ** -50
