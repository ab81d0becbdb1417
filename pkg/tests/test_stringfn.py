from fractions import Fraction

import pytest

import oracles
from qstring.errors import InvalidLabel, UndefinedNormalization
from qstring.series import Monomial
from qstring import stringfn as sf

# Normalized string functions, first 20 coefficients, frozen from the
# box-scan double-sum oracle in tests/oracles.py.
FROZEN_CURLY_C = {
    ((2, 5), 0, 0): [1, 1, 3, 6, 13, 24, 47, 83, 149, 254, 431, 707, 1154, 1836, 2899, 4498,
                     6919, 10497, 15802, 23518],
    ((2, 5), 2, 0): [0, 1, 2, 5, 10, 21, 39, 74, 130, 229, 386, 646, 1050, 1693, 2671, 4178,
                     6431, 9814, 14787, 22105],
    ((2, 5), 1, 1): [1, 2, 5, 11, 23, 45, 85, 154, 272, 467, 785, 1293, 2094, 3336, 5242, 8129,
                     12459, 18886, 28344, 42139],
    ((3, 7), 0, 2): [1, 3, 7, 16, 33, 66, 125, 231, 412, 721, 1230, 2065, 3401, 5526, 8842,
                     13985, 21843, 33772, 51668, 78345],
    ((3, 8), 2, 4): [1, 3, 8, 19, 41, 84, 164, 308, 560, 992, 1714, 2903, 4825, 7890, 12708,
                     20197, 31697, 49188, 75523, 114837],
    ((1, 3), 1, 1): [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77, 101, 135, 176, 231, 297,
                     385, 490],
    ((1, 4), 0, 2): [1, 2, 4, 7, 13, 21, 35, 55, 86, 130, 196, 287, 420, 602, 858, 1206, 1687,
                     2331, 3206, 4368],
    ((5, 11), 0, 2): [1, 3, 7, 16, 33, 66, 125, 231, 412, 721, 1230, 2065, 3402, 5529, 8851,
                      14007, 21894, 33880, 51887, 78768],
    ((5, 11), -4, 2): [0, 1, 3, 8, 18, 39, 78, 151, 279, 504, 882, 1515, 2544, 4207, 6837,
                       10968, 17352, 27150, 41995, 64336],
}


@pytest.mark.parametrize("key", list(FROZEN_CURLY_C), ids=str)
def test_curly_C_frozen_values(key):
    lv, m, ell = key
    got = sf.curly_C(lv, m, ell, 20)
    assert [got.coefficient(n) for n in range(20)] == FROZEN_CURLY_C[key]


@pytest.mark.parametrize("lv,m,ell", [((3, 7), 3, 1), ((3, 8), -5, 1), ((2, 5), 6, 2)])
def test_curly_C_against_live_oracle(lv, m, ell):
    got = sf.curly_C(lv, m, ell, 25)
    assert [got.coefficient(n) for n in range(25)] == oracles.curly_string_function(*lv, m, ell, 25)


def test_integral_level_one_is_inverse_euler_product():
    # N = 1: curly C_{1,1} = 1/(q)_inf, coefficients are partition numbers
    got = sf.curly_C((1, 3), 1, 1, 40)
    assert [got.coefficient(n) for n in range(40)] == oracles.partitions(40)


def test_coefficients_are_integers():
    for lv in [(2, 5), (3, 7), (5, 11)]:
        for m, ell in sf.Level(*lv).labels(4):
            s = sf.curly_C(lv, m, ell, 30)
            assert all(Fraction(c).denominator == 1 for _, c in s.items())


def test_label_validation():
    with pytest.raises(InvalidLabel):
        sf.curly_C((2, 5), 1, 0, 10)
    with pytest.raises(InvalidLabel):
        sf.curly_C((2, 5), 0, 4, 10)
    with pytest.raises(InvalidLabel):
        sf.Level(2, 4)
    with pytest.raises(UndefinedNormalization):
        sf.s_lambda_mu((1, 2), 0, 0)


@pytest.mark.parametrize("lv,ell,m", [((2, 5), 0, 0), ((2, 5), 1, -3), ((3, 7), 2, 4),
                                       ((5, 11), 3, -5), ((1, 4), 1, 1)])
def test_dual_route(lv, ell, m):
    res = sf.verify_dual_route(lv, ell, m, 30)
    assert res.status == "pass", res.to_json()


@pytest.mark.parametrize("lv,ell", [((2, 5), 0), ((3, 8), 3), ((1, 3), 1)])
def test_character_fourier_expansion(lv, ell):
    res = sf.verify_fourier_expansion(lv, ell, 12)
    assert res.status == "pass", res.to_json()


def test_symmetries_and_periodicity():
    for lv in [(2, 5), (1, 4), (1, 5)]:
        for res in sf.verify_symmetries(lv, 25, 4):
            assert res.status == "pass", res.to_json()
    for N in (1, 2, 3):
        assert all(r.status == "pass" for r in sf.verify_periodicity(N, 30))


@pytest.mark.parametrize("N,ell", [(1, 0), (2, 1), (3, 2)])
def test_integral_theta_decomposition(N, ell):
    assert sf.verify_theta_decomposition(N, ell, 12).status == "pass"


@pytest.mark.parametrize("identity_id", list(sf.KAC_PETERSON))
def test_eta_quotient_forms(identity_id):
    res = sf.verify_kac_peterson(identity_id, 100)
    assert res.status == "pass", res.to_json()


@pytest.mark.parametrize("identity_id", list(sf.KAC_PETERSON_MISSTATED))
def test_misstated_eta_quotient_forms_fail(identity_id):
    # Two commonly quoted forms carry a wrong eta exponent; they must fail
    # while the corrected forms above pass.
    res = sf.verify_kac_peterson(identity_id, 40, misstated=True)
    assert res.status == "fail"
    assert res.first_mismatch is not None


@pytest.mark.parametrize("p,j,r,s,t", [(2, 1, 0, 0, 1), (3, 2, 1, 1, 2), (4, 3, 2, 2, 1),
                                       (5, 2, 3, 0, 2)])
def test_quasi_periodicity(p, j, r, s, t):
    assert sf.verify_quasi_periodicity(p, j, r, s, t, 60).status == "pass"


def test_quasi_periodicity_steps_compose():
    # the t = 2 relation minus the t = 1 relation is C_{4j+2s} - C_{2j+2s}
    p, j, r, s, W = 3, 2, 1, 1, 50
    lv = sf.Level(p, 2 * p + j)
    _, one = sf.quasi_periodicity_sides(p, j, r, s, 1, W)
    _, two = sf.quasi_periodicity_sides(p, j, r, s, 2, W)
    step = sf._pc(lv, 4 * j + 2 * s, 2 * r, W) - sf._pc(lv, 2 * j + 2 * s, 2 * r, W)
    assert (two - one).first_mismatch(step, W) is None


@pytest.mark.parametrize("p,j,i,r", [(2, 1, 1, 1), (3, 1, 0, 2), (5, 1, 2, 3), (4, 3, -1, 2)])
def test_cross_spin(p, j, i, r):
    assert sf.verify_cross_spin(p, j, i, r, 60).status == "pass"


def test_cross_spin_even_j_rejected():
    assert sf.verify_cross_spin(3, 2, 1, 1, 20).status == "error"


@pytest.mark.parametrize("r", [1, 2])
def test_cross_spin_specialised_two_five(r):
    assert sf.verify_cross_spin_25(r, 60).status == "pass"


@pytest.mark.parametrize("i,r", [(1, 1), (0, 2), (2, 3)])
def test_cross_spin_specialised_three_seven(i, r):
    assert sf.verify_cross_spin_37(i, r, 60).status == "pass"


@pytest.mark.parametrize("p,r,z0", [(2, 0, "-1"), (2, 1, "-q"), (3, 2, "-q^2"), (3, 0, "-q^1/2")])
def test_polar_finite_j1(p, r, z0):
    res = sf.verify_polar_finite_j1(p, r, z0, 50)
    assert res.status == "pass", res.to_json()


@pytest.mark.parametrize("r,z0", [(0, "-q"), (1, "-q"), (2, "-q^1/3"), (3, "q^1/2")])
def test_polar_finite_general(r, z0):
    res = sf.verify_polar_finite(3, 2, r, z0, 40)
    assert res.status == "pass", res.to_json()


def test_polar_finite_at_theta_zero_is_skipped():
    assert sf.verify_polar_finite(3, 2, 0, "q", 20).status == "skipped-nongeneric"


def test_heuristic_residual_at_p_one_is_the_whole_series():
    res = sf.heuristic_residual(1, 1, 0, 0, Monomial(-1, Fraction(1, 2)), 30)
    assert res.first_mismatch(sf.qpoch3_curly_C((1, 3), 0, 0, 30), 30) is None


def test_heuristic_residual_is_invariant_under_z_period():
    p, j = 2, 1
    a = sf.heuristic_residual(p, j, 0, 0, Monomial(-1, Fraction(1, 2)), 30)
    b = sf.heuristic_residual(p, j, 0, 0, Monomial(-1, Fraction(1, 2) + 2 * p * j), 30)
    assert not a.is_zero()
    assert a.first_mismatch(b, 30) is None


def test_false_theta_signs():
    # sum_R sg(R) q^(2R^2 + R): R >= 0 gives +q^0, q^3, q^10; R < 0 gives -q^1, q^6
    ft = sf.false_theta(2, 1, 12)
    assert dict(ft.items()) == {0: 1, 1: -1, 3: 1, 6: -1, 10: 1}


@pytest.mark.parametrize("p,pp,m,ell", [(3, 5, 0, 0), (3, 5, 3, 1), (4, 7, -2, 2), (5, 8, 4, 6)])
def test_negative_level(p, pp, m, ell):
    assert sf.verify_negative_level(p, pp, m, ell, 60).status == "pass"


@pytest.mark.parametrize("identity_id", list(sf.MOCK_IDENTITIES))
def test_level_identities_low_order(identity_id):
    for r in sf.MOCK_IDENTITIES[identity_id][1]:
        res = sf.verify_mock_identity(identity_id, r, 60)
        assert res.status == "pass", res.to_json()
