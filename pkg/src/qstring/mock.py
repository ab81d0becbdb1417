"""Mock theta functions: Eulerian sums, Appell forms, and identities built on them.

Every Eulerian sum is evaluated through the ratio of consecutive terms, so
each step costs one or two binomial multiplications or divisions.  The loop
stops once the current term vanishes below the order and every later ratio
has a positive lowest exponent; the growth of each term is noted per function.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, Optional

from .appell import appell_m
from .errors import NonGenericParameters
from .series import (
    Monomial,
    ScaledSeries,
    as_fraction,
    dissect,
    q,
    sign_twist,
    substitute_power,
)
from .theta import J, Jbar, Jm, geometric, j_sum, parity
from .verify import IdentityResult, check, parse_monomial

HALF = Fraction(1, 2)


def _recurrence_sum(t0: ScaledSeries, step: Callable[[int, ScaledSeries], ScaledSeries],
                    order, stable_from: int = 0) -> ScaledSeries:
    """``sum_{n>=0} t_n`` with ``t_{n+1} = step(n, t_n)``.

    From ``stable_from`` on every step multiplies by a series whose lowest
    exponent is positive, so once a term vanishes below ``order`` so do all
    later ones.
    """
    order = as_fraction(order)
    total = ScaledSeries.zero(order)
    t = t0.truncate(order)
    n = 0
    while True:
        if t.is_zero() and n >= stable_from:
            return total
        total = total + t
        t = step(n, t).truncate(order)
        n += 1
        if n > 10 ** 6:
            raise RuntimeError("Eulerian sum did not terminate")


def _over(t: ScaledSeries, coeff: int, exp) -> ScaledSeries:
    """``t / (1 + coeff q^exp)`` with ``exp > 0``."""
    return t.div_binomial(coeff, exp)


def _times_binomial(t: ScaledSeries, coeff: int, exp) -> ScaledSeries:
    return t.mul_binomial(coeff, exp)


def _start(order, exp=0) -> ScaledSeries:
    return ScaledSeries.monomial(exp).truncate(as_fraction(order))


# term growth is noted as the exponent of q in t_n

def f3(order) -> ScaledSeries:
    """``sum q^(n^2) / (-q;q)_n^2``; t_n ~ q^(n^2)."""
    return _recurrence_sum(_start(order),
                           lambda n, t: _over(_over(t.shift(2 * n + 1), 1, n + 1), 1, n + 1),
                           order)


def omega3(order) -> ScaledSeries:
    """``sum q^(2n(n+1)) / (q;q^2)_{n+1}^2``; t_n ~ q^(2n(n+1))."""
    t0 = _over(_over(_start(order), -1, 1), -1, 1)
    return _recurrence_sum(t0, lambda n, t: _over(_over(t.shift(4 * n + 4), -1, 2 * n + 3),
                                                  -1, 2 * n + 3), order)


def A2(order) -> ScaledSeries:
    """``sum q^(n+1) (-q^2;q^2)_n / (q;q^2)_{n+1}``; t_n ~ q^(n+1), linear growth."""
    t0 = _over(_start(order, 1), -1, 1)
    return _recurrence_sum(
        t0, lambda n, t: _over(_times_binomial(t.shift(1), 1, 2 * n + 2), -1, 2 * n + 3), order)


def A2_squares(order) -> ScaledSeries:
    """``sum q^((n+1)^2) (-q;q^2)_n / (q;q^2)_{n+1}^2``; t_n ~ q^((n+1)^2)."""
    t0 = _over(_over(_start(order, 1), -1, 1), -1, 1)

    def step(n, t):
        t = _times_binomial(t.shift(2 * n + 3), 1, 2 * n + 1)
        return _over(_over(t, -1, 2 * n + 3), -1, 2 * n + 3)

    return _recurrence_sum(t0, step, order)


def mu2(order) -> ScaledSeries:
    """``sum (-1)^n q^(n^2) (q;q^2)_n / (-q^2;q^2)_n^2``; t_n ~ q^(n^2)."""
    def step(n, t):
        t = _times_binomial(t.shift(2 * n + 1), -1, 2 * n + 1) * -1
        return _over(_over(t, 1, 2 * n + 2), 1, 2 * n + 2)

    return _recurrence_sum(_start(order), step, order)


def f0(order) -> ScaledSeries:
    """``sum q^(n^2) / (-q;q)_n``; t_n ~ q^(n^2)."""
    return _recurrence_sum(_start(order),
                           lambda n, t: _over(t.shift(2 * n + 1), 1, n + 1), order)


def f1(order) -> ScaledSeries:
    """``sum q^(n(n+1)) / (-q;q)_n``; t_n ~ q^(n(n+1))."""
    return _recurrence_sum(_start(order),
                           lambda n, t: _over(t.shift(2 * n + 2), 1, n + 1), order)


def phi10(order) -> ScaledSeries:
    """``sum q^C(n+1,2) / (q;q^2)_{n+1}``; t_n ~ q^(n(n+1)/2)."""
    t0 = _over(_start(order), -1, 1)
    return _recurrence_sum(t0, lambda n, t: _over(t.shift(n + 1), -1, 2 * n + 3), order)


def psi10(order) -> ScaledSeries:
    """``sum q^C(n+2,2) / (q;q^2)_{n+1}``; t_n ~ q^((n+1)(n+2)/2)."""
    t0 = _over(_start(order, 1), -1, 1)
    return _recurrence_sum(t0, lambda n, t: _over(t.shift(n + 2), -1, 2 * n + 3), order)


def X10(order) -> ScaledSeries:
    """``sum (-1)^n q^(n^2) / (-q;q)_{2n}``; t_n ~ q^(n^2)."""
    return _recurrence_sum(
        _start(order),
        lambda n, t: _over(_over(t.shift(2 * n + 1) * -1, 1, 2 * n + 1), 1, 2 * n + 2), order)


def chi10(order) -> ScaledSeries:
    """``sum (-1)^n q^((n+1)^2) / (-q;q)_{2n+1}``; t_n ~ q^((n+1)^2)."""
    t0 = _over(_start(order, 1), 1, 1)
    return _recurrence_sum(
        t0, lambda n, t: _over(_over(t.shift(2 * n + 3) * -1, 1, 2 * n + 2), 1, 2 * n + 3),
        order)


def _over_one_minus(t: ScaledSeries, u: Monomial, order) -> ScaledSeries:
    """``t / (1 - u)`` for a scalar monomial u, expanded where it converges."""
    if u.sign == 1 and u.qexp == 0:
        raise NonGenericParameters("a Pochhammer factor 1 - 1 vanishes")
    g = geometric(u, as_fraction(order) - t.min_exp + abs(u.qexp))
    return (t * g).truncate(order)


def g_universal(x, qmod=1, order=20) -> ScaledSeries:
    """``g(x; Q) = x^-1 (-1 + sum Q^(n^2) / ((x;Q)_{n+1} (Q/x;Q)_n))`` with ``Q = q^qmod``.

    t_n ~ Q^(n^2) once ``x Q^n`` and ``Q^n / x`` have positive exponents.
    """
    x = parse_monomial(x)
    M = as_fraction(qmod)
    order = as_fraction(order)
    W = order + abs(x.qexp)
    stable = int(abs(x.qexp) / M) + 2
    t0 = _over_one_minus(ScaledSeries.one(), x, W)

    def step(n, t):
        t = t.shift((2 * n + 1) * M)
        t = _over_one_minus(t, Monomial(1, (n + 1) * M) * x, W)
        return _over_one_minus(t, Monomial(1, (n + 1) * M) / x, W)

    s = _recurrence_sum(t0, step, W, stable)
    return ((s - 1) * x.inverse()).truncate(order)


EULERIAN: Dict[str, Callable] = {
    "f3": f3,
    "omega3": omega3,
    "A2": A2,
    "A2-squares": A2_squares,
    "mu2": mu2,
    "f0": f0,
    "f1": f1,
    "phi10": phi10,
    "psi10": psi10,
    "X10": X10,
    "chi10": chi10,
}


def eulerian(mock_id: str, order, x=None, qmod=1) -> ScaledSeries:
    if mock_id == "g":
        return g_universal(x, qmod, order)
    try:
        return EULERIAN[mock_id](as_fraction(order))
    except KeyError:
        raise KeyError(f"unknown mock theta function {mock_id!r}") from None


def at_power(f: Callable, k: int, order, twist: bool = False) -> ScaledSeries:
    """``f(q^k)`` or ``f(-q^k)`` valid below order."""
    base = f(as_fraction(order) / k)
    if twist:
        base = sign_twist(base)
    return substitute_power(base, k)


# ---------------------------------------------------------------------------
# Appell forms


def _m(x, zz, qmod, W):
    return appell_m(parse_monomial(x), parse_monomial(zz), qmod, W)


def g_appell(x, qmod, W) -> ScaledSeries:
    """``-x^-1 m(Q^2 x^-3, x^2; Q^3) - x^-2 m(Q x^-3, x^2; Q^3)``."""
    x = parse_monomial(x)
    M = as_fraction(qmod)
    xi = x.inverse()
    a = _m(Monomial(1, 2 * M) * xi ** 3, x ** 2, 3 * M, W + x.qexp) * (-xi)
    b = _m(Monomial(1, M) * xi ** 3, x ** 2, 3 * M, W + 2 * x.qexp) * (-(xi ** 2))
    return (a + b).truncate(W)


APPELL_FORMS: Dict[str, Callable] = {
    "f3": lambda W: 2 * _m("-q", "q", 3, W) + 2 * _m("-q", "q^2", 3, W),
    "omega3": lambda W: (-(_m("q", "q^2", 6, W + 1) + _m("q", "q^4", 6, W + 1))).shift(-1),
    "A2": lambda W: -_m("q", "q^2", 4, W),
    "A2-squares": lambda W: -_m("q", "q^2", 4, W),
    "mu2": lambda W: 2 * _m("-q", "-1", 4, W) + 2 * _m("-q", "q", 4, W),
    "phi10": lambda W: (-(_m("q", "q", 10, W + 1) + _m("q", "q^2", 10, W + 1))).shift(-1),
    "psi10": lambda W: -(_m("q^3", "q", 10, W) + _m("q^3", "q^3", 10, W)),
    "X10": lambda W: _m("-q^2", "q", 5, W) + _m("-q^2", "q^4", 5, W),
    "chi10": lambda W: _m("-q", "q^2", 5, W) + _m("-q", "q^3", 5, W),
}


def verify_appell_form(mock_id: str, order=60, x=None, qmod=1) -> IdentityResult:
    """Eulerian definition against the Appell-function form."""
    if mock_id == "g":
        x = parse_monomial(x if x is not None else "q^2")
        params = {"x": x, "qmod": qmod}
        return check("appell-form-g", params, order,
                     lambda W: (g_universal(x, qmod, W), g_appell(x, qmod, W)))
    build = APPELL_FORMS[mock_id]
    return check(f"appell-form-{mock_id}", {}, order,
                 lambda W: (eulerian(mock_id, W), build(W)))


# ---------------------------------------------------------------------------
# alternate Appell forms


def _quot(num, den, W) -> ScaledSeries:
    """Product of ``num`` series over product of ``den`` series, valid below W."""
    top = ScaledSeries.one()
    for s in num:
        top = top * s
    bot = ScaledSeries.one()
    for s in den:
        bot = bot * s
    return (top / bot).truncate(W)


def _alt_f3(W):
    lhs = 2 * _m("-q^4", "q^6", 12, W)
    P = W + 2
    th = _quot([Jm(2, P) ** 4, Jm(12, P) ** 6], [Jm(4, P) ** 3, Jm(6, P) ** 4, Jm(24, P) ** 2], W)
    return lhs, (at_power(f3, 4, W) - th) * HALF


def _alt_omega3(W):
    lhs = 2 * _m("-q^2", "q^6", 12, W)
    P = W + 2
    th = _quot([Jm(24, P) ** 2, Jm(2, P) ** 4], [Jm(4, P) ** 3, Jm(6, P) ** 2], W)
    return lhs, (at_power(omega3, 2, W, twist=True) - th).shift(2).truncate(W)


def _ten_quot(a: int, b: int, c: int, e: int, W):
    """``J_10^2 J_{a,10} / (Jbar_{b,5} J_{c,10}) * J_1 / Jbar_{e,10}``."""
    P = W + 2
    return _quot([Jm(10, P) ** 2, J(a, 10, P), Jm(1, P)],
                 [Jbar(b, 5, P), J(c, 10, P), Jbar(e, 10, P)], W)


def _theta_phi(W):
    return _ten_quot(3, 1, 2, 3, W)


def _theta_chi(W):
    return _ten_quot(1, 2, 4, 4, W)


def _theta_psi(W):
    return _ten_quot(1, 2, 4, 1, W)


def _theta_X(W):
    return _ten_quot(3, 1, 2, 2, W)


def _alt_phi10(W):
    lhs = 2 * _m("-q", "q^5", 10, W)
    return lhs, (at_power(phi10, 1, W, twist=True) - _theta_phi(W)).shift(1).truncate(W)


def _alt_chi10(W):
    lhs = 2 * _m("-q^2", "q^5", 10, W)
    return lhs, at_power(chi10, 2, W) - _theta_chi(W).shift(2).truncate(W)


def _alt_psi10(W):
    lhs = 2 * _m("-q^3", "q^5", 10, W)
    return lhs, -at_power(psi10, 1, W, twist=True) - _theta_psi(W).shift(1).truncate(W)


def _alt_X10(W):
    lhs = 2 * _m("-q^4", "q^5", 10, W)
    return lhs, at_power(X10, 2, W) - _theta_X(W)


ALTERNATE_FORMS: Dict[str, Callable] = {
    "alt-f3": _alt_f3,
    "alt-omega3": _alt_omega3,
    "alt-phi10": _alt_phi10,
    "alt-chi10": _alt_chi10,
    "alt-psi10": _alt_psi10,
    "alt-X10": _alt_X10,
}


def verify_alternate_form(form_id: str, order=60) -> IdentityResult:
    build = ALTERNATE_FORMS[form_id]
    return check(form_id, {}, order, build)


# ---------------------------------------------------------------------------
# fifth-order conjectures and tenth-order identities


def _conj_f0(W):
    P = W + 2
    th = _quot([J(5, 10, P), J(2, 5, P)], [Jm(1, P)], W)
    return f0(W), th - 2 * g_universal(q(2), 10, W - 2).shift(2)


def _conj_f1(W):
    P = W + 2
    th = _quot([J(5, 10, P), J(1, 5, P)], [Jm(1, P)], W)
    return f1(W), th - 2 * g_universal(q(4), 10, W - 3).shift(3)


MOCK_CONJECTURES: Dict[str, Callable] = {"f0": _conj_f0, "f1": _conj_f1}


def verify_mock_theta_conjecture(conj_id: str, order=60) -> IdentityResult:
    return check(f"conjecture-{conj_id}", {}, order, MOCK_CONJECTURES[conj_id])


def _tenth_theta(a: int, W):
    """``J_{1,2} / J_{3,6} * J_{a,15} J_6 / J_3``."""
    P = W + 2
    return _quot([J(1, 2, P), J(a, 15, P), Jm(6, P)], [J(3, 6, P), Jm(3, P)], W)


def _tenth_1(W):
    psi = psi10(W)
    lhs = at_power(phi10, 9, W - 2).shift(2) - (dissect(psi, 3, 1) - dissect(psi, 3, 2))
    return lhs.truncate(W), -_tenth_theta(3, W - 1).shift(1)


def _tenth_2(W):
    phi = phi10(W)
    lhs = at_power(psi10, 9, W + 2).shift(-2) + (dissect(phi, 3, 0) - dissect(phi, 3, 1))
    return lhs.truncate(W), _tenth_theta(6, W)


TENTH_ORDER: Dict[str, Callable] = {"identity-1": _tenth_1, "identity-2": _tenth_2}


def verify_tenth_order_dissection(identity_id: str, order=60) -> IdentityResult:
    return check(f"tenth-order-{identity_id}", {}, order, TENTH_ORDER[identity_id])


# ---------------------------------------------------------------------------
# the three families of pure theta identities

# sign tables, indexed by r
KAPPA = {0: 0, 1: 0, 2: 1, 3: 1}
DELTA = {0: 0, 1: 1, 2: 1, 3: 0}
FLOOR_HALF_R_PLUS_1 = {0: 0, 1: 1, 2: 1, 3: 2}


def _jq(a, b, W, sign=1):
    """``j(sign q^a; q^b)``."""
    return j_sum(Monomial(sign, as_fraction(a)), b, W)


def _mono_times(e, series_at: Callable, W, coeff=1) -> ScaledSeries:
    """``coeff q^e * series`` valid below W."""
    e = as_fraction(e)
    return (series_at(W - e).shift(e) * coeff).truncate(W)


def omega_quot(W):
    """``J_24^2 J_2^4 / (J_4^3 J_6^2)``."""
    P = W + 2
    return _quot([Jm(24, P) ** 2, Jm(2, P) ** 4], [Jm(4, P) ** 3, Jm(6, P) ** 2], W)


def f_quot(W):
    """``J_2^4 J_12^6 / (J_4^3 J_6^4 J_24^2)``."""
    P = W + 2
    return _quot([Jm(2, P) ** 4, Jm(12, P) ** 6],
                  [Jm(4, P) ** 3, Jm(6, P) ** 4, Jm(24, P) ** 2], W)


def _pair16(r, W):
    """The two theta weights at level (3,8)."""
    P = W + 2
    a = _quot([_jq(7 - 2 * r, 16, P), _jq(30 - 4 * r, 32, P)], [Jm(32, P)], W)
    b = _quot([_jq(1 + 2 * r, 16, P), _jq(18 + 4 * r, 32, P)], [Jm(32, P)], W)
    return a, b


def _chi_value_quot(a: int, W):
    """``J_1^3 / J_{6,12} * J_2 / (J_1 J_4) * j(-q^a; q^48)``."""
    P = W + 2
    return _quot([Jm(1, P) ** 3, Jm(2, P), _jq(a, 48, P, -1)], [J(6, 12, P), Jm(1, P), Jm(4, P)], W)


def _master_38m0(r, W):
    wa, wb = _pair16(r, W + 2 * r + 2)
    P = W + 2 * r + 4
    lhs = (_chi_value_quot(27 + 6 * r, W) * parity(KAPPA[r])
           + (wa * omega_quot(P)).shift(3 - 2 * r)
           - (wb * f_quot(P)).shift(-r) * HALF).truncate(W)
    rhs = (_quot([Jm(1, P) ** 2, Jm(2, P), _jq(7 - 2 * r, 16, P, -1), _jq(1 + 2 * r, 8, P)],
                 [Jm(4, P) ** 2, Jm(8, P)], P).shift(-r) * (HALF * parity(DELTA[r]))).truncate(W)
    return lhs, rhs


def _master_38m2(r, W):
    wa, wb = _pair16(r, W + 2 * r + 2)
    P = W + 3 * r + 4
    lhs = (-_chi_value_quot(3 + 6 * r, P).shift(6 - 3 * r) * parity(KAPPA[r])
           - (wa * f_quot(P)).shift(3 - 2 * r) * HALF
           + (wb * omega_quot(P)).shift(3 - r)).truncate(W)
    rhs = (_quot([Jm(1, P) ** 2, Jm(2, P), _jq(2 + 4 * r, 32, P), _jq(7 - 2 * r, 16, P)],
                 [Jm(4, P) ** 2, Jm(32, P)], P).shift(3 - 2 * r)
           * (HALF * parity(DELTA[r]))).truncate(W)
    return lhs, rhs


def bracket110(a: int, e: int, b: int, W) -> ScaledSeries:
    """``j(-q^a; q^110) - q^e j(-q^b; q^110)``."""
    return (_jq(a, 110, W, -1) - _jq(b, 110, W - e, -1).shift(e)).truncate(W)


def brackets511(r, W):
    return [bracket110(16 + 10 * r, 4 + 8 * r, 6 - 10 * r, W),
            bracket110(27 + 10 * r, 3 + 6 * r, 17 - 10 * r, W),
            bracket110(38 + 10 * r, 2 + 4 * r, 28 - 10 * r, W),
            bracket110(49 + 10 * r, 1 + 2 * r, 39 - 10 * r, W)]


def _master_511(r, W):
    P = W + 6 * r + 8
    B1, B2, B3, B4 = brackets511(r, P)
    lhs = _mono_times(r * r - 3 * r + 1, lambda o: J(1, 2, o) * _jq(4 + 8 * r, 22, o), W, -1)
    first = _quot([Jm(1, P) ** 3, _jq(50 - 10 * r, 110, P)], [J(5, 10, P), _jq(0, 1, P, -1)], P)
    rhs = (first * (2 * parity(r))
           + (B1 * _theta_phi(P)).shift(6 - 4 * r + 1)
           - (B2 * _theta_chi(P)).shift(3 - 3 * r + 2)
           + (B3 * _theta_psi(P)).shift(1 - 2 * r + 1)
           - (B4 * _theta_X(P)).shift(-r)).truncate(W)
    return lhs, rhs


MASTER_THETA: Dict[str, Callable] = {
    "pP38m0": _master_38m0,
    "pP38m2": _master_38m2,
    "pP511": _master_511,
}

MASTER_RANGES = {"pP38m0": range(4), "pP38m2": range(4), "pP511": range(5)}


def verify_master_theta_family(family: str, r: int, order=60) -> IdentityResult:
    if r not in MASTER_RANGES[family]:
        raise ValueError(f"r={r} outside the range of {family}")
    return check(family, {"r": r}, order, lambda W: MASTER_THETA[family](r, W))
