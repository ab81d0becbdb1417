"""Theta functions, Pochhammer products and the classical theta identities.

Notation used in names below:

* ``j(x; q^M) = (x; q^M)_inf (q^M/x; q^M)_inf (q^M; q^M)_inf``
* ``J(a, b) = j(q^a; q^b)``, ``Jbar(a, b) = j(-q^a; q^b)``
* ``Jm(a) = (q^a; q^a)_inf``
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Tuple

from .errors import DivergentProduct, NonGenericParameters, PoleAtLatticePoint
from .series import (
    INF,
    BiSeries,
    Monomial,
    ScaledSeries,
    _scale_of,
    _scaled_order,
    as_fraction,
    q,
)
from .verify import check, parse_monomial


def binom2(n) -> int:
    """n choose 2, for any integer n."""
    return n * (n - 1) // 2


def parity(n) -> int:
    """(-1)^n for any integer n."""
    return -1 if n % 2 else 1


# ---------------------------------------------------------------------------
# products


def _binomial_product(factors: List[Tuple[int, int]], vb: int, scale: int,
                      exact: bool) -> ScaledSeries:
    """Expand ``prod (1 + c q^(e/scale))`` on a dense array.

    Factors with negative exponent go first so that truncating at ``vb``
    never drops a term that a later factor would pull back down.
    """
    factors = sorted(factors, key=lambda f: f[1])
    neg = sum(e for _, e in factors if e < 0)
    if exact:
        vb = sum(e for _, e in factors if e > 0) + 1
    length = vb - neg
    if length <= 0:
        return ScaledSeries({}, scale, vb)
    arr = [0] * length
    arr[-neg] = 1
    for c, e in factors:
        if e > 0:
            for i in range(length - 1, e - 1, -1):
                v = arr[i - e]
                if v:
                    arr[i] += c * v
        else:
            for i in range(0, length + e):
                v = arr[i - e]
                if v:
                    arr[i] += c * v
    out = {i + neg: v for i, v in enumerate(arr) if v}
    return ScaledSeries(out, scale, INF if exact else vb)


def pochhammer(x: Monomial, qmod=1, n: Optional[int] = None, order=None) -> ScaledSeries:
    """``(x; q^qmod)_n``; ``n=None`` means the infinite product."""
    x = parse_monomial(x)
    M = as_fraction(qmod)
    if M <= 0:
        raise DivergentProduct("base exponent must be positive")
    if n is not None and n < 0:
        raise ValueError("negative length; use pochhammer_inverse")
    d = _scale_of(x.qexp, M, order if order is not None else 0)
    a, m = int(x.qexp * d), int(M * d)
    c = -x.sign
    if n is None:
        if order is None:
            raise ValueError("an infinite product needs an order")
        vb = _scaled_order(order, d)
        factors, neg, const, i = [], 0, 1, 0
        while True:
            e = a + i * m
            if e == 0:
                const *= 1 + c
                if const == 0:
                    return ScaledSeries.zero(INF)
            elif e < 0:
                neg += e
                factors.append((c, e))
            elif e >= vb - neg:
                break
            else:
                factors.append((c, e))
            i += 1
        return _binomial_product(factors, vb, d, exact=False) * const
    factors = [(c, a + i * m) for i in range(n)]
    const = 1
    for cc, e in factors:
        if e == 0:
            const *= 1 + cc
    if const == 0:
        return ScaledSeries.zero(INF)
    finite = [(cc, e) for cc, e in factors if e != 0]
    if order is None:
        return _binomial_product(finite, 0, d, exact=True) * const
    return _binomial_product(finite, _scaled_order(order, d), d, exact=False) * const


def pochhammer_inverse(x: Monomial, qmod=1, n: Optional[int] = None, order=None
                       ) -> ScaledSeries:
    """``1 / (x; q^qmod)_n`` expanded as a Laurent series, valid below ``order``."""
    x = parse_monomial(x)
    M = as_fraction(qmod)
    if order is None:
        raise ValueError("an inverse product needs an order")
    d = _scale_of(x.qexp, M, order)
    a, m = int(x.qexp * d), int(M * d)
    vb = _scaled_order(order, d)
    # 1/(1 - s q^e) = -s q^-e / (1 - s q^-e) when e < 0
    pre_sign, pre_exp, const = 1, 0, Fraction(1)
    pos: List[Tuple[int, int]] = []
    i = 0
    while n is None or i < n:
        e = a + i * m
        s = x.sign
        if e < 0:
            pre_sign *= -s
            pre_exp -= e
            pos.append((s, -e))
        elif e == 0:
            if s == 1:
                raise PoleAtLatticePoint("factor 1 - 1 in an inverse product")
            const /= 2
        elif e >= vb - pre_exp:
            if n is None:
                break
        else:
            pos.append((s, e))
        i += 1
    # Result is pre * prod 1/(1 - s q^e) with all e > 0.
    need = vb - pre_exp
    if need <= 0:
        return ScaledSeries({}, d, vb)
    arr = [0] * need
    arr[0] = 1
    for s, e in pos:
        if e >= need:
            continue
        for k in range(e, need):
            v = arr[k - e]
            if v:
                arr[k] += s * v
    c0 = const * pre_sign
    out = {k + pre_exp: v * c0 for k, v in enumerate(arr) if v}
    return ScaledSeries(out, d, vb)


# ---------------------------------------------------------------------------
# theta functions


def _is_lattice_zero(x: Monomial, M: Fraction) -> bool:
    return x.sign == 1 and x.zexp == 0 and (x.qexp / M).denominator == 1


def _j_index_range(alpha: Fraction, M: Fraction, order) -> range:
    """Integers n with ``M*C(n,2) + n*alpha < order``."""
    v = Fraction(1, 2) - alpha / M
    center = math.floor(v)

    def e(n):
        return M * binom2(n) + n * alpha

    lo, hi = center, center + 1
    while e(lo) < order:
        lo -= 1
    while e(hi) < order:
        hi += 1
    return range(lo + 1, hi)


@lru_cache(maxsize=8192)
def _j_sum_cached(x: Monomial, M: Fraction, order: Fraction, base_sign: int):
    if x.zexp == 0 and base_sign == 1 and _is_lattice_zero(x, M):
        return ScaledSeries.zero(INF)
    d = _scale_of(x.qexp, M, order)
    vb = _scaled_order(order, d)
    alpha = x.qexp
    ns = _j_index_range(alpha, M, order)
    if x.zexp == 0:
        out: Dict[int, int] = {}
        for n in ns:
            b = binom2(n)
            sgn = parity(n) * (x.sign if n % 2 else 1) * (base_sign if b % 2 else 1)
            k = int((M * b + n * alpha) * d)
            out[k] = out.get(k, 0) + sgn
        return ScaledSeries(out, d, vb)
    coeffs: Dict[int, ScaledSeries] = {}
    zk = int(x.zexp * 2)
    for n in ns:
        b = binom2(n)
        sgn = parity(n) * (x.sign if n % 2 else 1) * (base_sign if b % 2 else 1)
        k = int((M * b + n * alpha) * d)
        coeffs[n * zk] = ScaledSeries({k: sgn}, d, vb)
    keys = [n * zk for n in ns] or [0]
    return BiSeries(coeffs, min(keys), max(keys), as_fraction(order))


def j_sum(x, qmod=1, order=20, base_sign: int = 1):
    """``j(x; q^qmod)`` from the triple-product sum ``sum (-1)^n Q^C(n,2) x^n``.

    ``base_sign=-1`` gives ``j(x; -q^qmod)``.  A monomial ``x`` involving z
    produces a complete :class:`BiSeries`.
    """
    x = parse_monomial(x)
    M = as_fraction(qmod)
    if M <= 0:
        raise ValueError("theta base exponent must be positive")
    if base_sign not in (1, -1):
        raise ValueError("base_sign must be +1 or -1")
    return _j_sum_cached(x, M, as_fraction(order), base_sign)


j = j_sum


def j_euler(x, qmod=1, order=20) -> ScaledSeries:
    """``sum_n (-1)^n n Q^C(n,2) x^n``: ``z d/dz j(z;Q)`` evaluated at ``z = x``."""
    x = parse_monomial(x)
    M = as_fraction(qmod)
    order = as_fraction(order)
    d = _scale_of(x.qexp, M, order)
    out: Dict[int, int] = {}
    for n in _j_index_range(x.qexp, M, order):
        sgn = parity(n) * (x.sign if n % 2 else 1)
        k = int((M * binom2(n) + n * x.qexp) * d)
        out[k] = out.get(k, 0) + sgn * n
    return ScaledSeries(out, d, _scaled_order(order, d))


def j_product(x, qmod=1, order=20) -> ScaledSeries:
    """``j(x; q^qmod)`` from the product form, after moving the argument into
    the fundamental strip with the quasi-periodicity of j."""
    x = parse_monomial(x)
    M = as_fraction(qmod)
    if x.zexp != 0:
        raise ValueError("product form is only provided for scalar arguments")
    if _is_lattice_zero(x, M):
        return ScaledSeries.zero(INF)
    n = math.floor(x.qexp / M)
    x0 = Monomial(x.sign, x.qexp - n * M)
    # j(Q^n x0) = (-1)^n Q^{-C(n,2)} x0^{-n} j(x0)
    pre = Monomial(parity(n) * (x0.sign if n % 2 else 1),
                   -M * binom2(n) - n * x0.qexp)
    inner_order = as_fraction(order) - pre.qexp
    body = (pochhammer(x0, M, None, inner_order)
            * pochhammer(Monomial(x0.sign, M - x0.qexp), M, None, inner_order)
            * pochhammer(Monomial(1, M), M, None, inner_order))
    return (body * pre).truncate(order)


def J(a, b, order) -> ScaledSeries:
    """``J_{a,b} = j(q^a; q^b)``."""
    return j_sum(Monomial(1, as_fraction(a)), b, order)


def Jbar(a, b, order) -> ScaledSeries:
    """``j(-q^a; q^b)``."""
    return j_sum(Monomial(-1, as_fraction(a)), b, order)


def Jm(a, order) -> ScaledSeries:
    """``(q^a; q^a)_inf``, computed as ``j(q^a; q^(3a))``."""
    return j_sum(Monomial(1, as_fraction(a)), 3 * as_fraction(a), order)


def Jprod(powers: Dict[int, int], order) -> ScaledSeries:
    """``prod Jm(a)^e`` over ``powers = {a: e}``."""
    num, den = ScaledSeries.one(), ScaledSeries.one()
    for a, e in sorted(powers.items()):
        if e > 0:
            num = num * Jm(a, order) ** e
        elif e < 0:
            den = den * Jm(a, order) ** (-e)
    if den.is_exact:
        return num
    return num / den


def scriptJ(a, b, order) -> ScaledSeries:
    """``q^((b - 2a)^2 / 8b) J_{a,b}``."""
    a, b = as_fraction(a), as_fraction(b)
    e = (b - 2 * a) ** 2 / (8 * b)
    return J(a, b, as_fraction(order) - e).shift(e)


def eta(k=1, order=20) -> ScaledSeries:
    """Dedekind eta at ``k*tau``: ``q^(k/24) (q^k; q^k)_inf``."""
    k = as_fraction(k)
    e = k / 24
    return Jm(k, as_fraction(order) - e).shift(e)


def theta_series(n, m, order) -> BiSeries:
    """``Theta_{n,m}(z;q) = sum_{j in Z + n/2m} q^(m j^2) z^(-m j)``, complete."""
    n, m = as_fraction(n), as_fraction(m)
    shift = n / (2 * m)
    coeffs = {}
    lo = math.floor(-shift) - 1
    ks = []
    k = math.floor(-shift)
    # q-exponent m*(k+shift)^2 is minimized near k = -shift
    kk = k
    while m * (kk + shift) ** 2 < order:
        ks.append(kk)
        kk -= 1
    kk = k + 1
    while m * (kk + shift) ** 2 < order:
        ks.append(kk)
        kk += 1
    for kk in ks:
        jj = kk + shift
        zk = int(-m * jj * 2)
        coeffs[zk] = ScaledSeries.from_terms({m * jj * jj: 1}, order)
    keys = list(coeffs) or [0]
    return BiSeries(coeffs, min(keys), max(keys), as_fraction(order))


def theta_series_via_j(n, m, order) -> BiSeries:
    """``z^(-n/2) q^(n^2/4m) j(-q^(n+m) z^(-m); q^(2m))``."""
    n, m = as_fraction(n), as_fraction(m)
    e = n * n / (4 * m)
    body = j_sum(Monomial(-1, n + m, -m), 2 * m, as_fraction(order) - e)
    return body.scale_by(Monomial(1, e, -n / 2))


# ---------------------------------------------------------------------------
# sums with geometric denominators


def geometric(u: Monomial, order) -> ScaledSeries:
    """``1 / (1 - u)`` expanded in the direction where it converges."""
    if u.qexp > 0:
        d = _scale_of(u.qexp, order)
        vb = _scaled_order(order, d)
        step = int(u.qexp * d)
        return ScaledSeries({k * step: (u.sign if k % 2 else 1) for k in range(0, max(0, -(-vb // step)))},
                            d, vb)
    if u.qexp < 0:
        # 1/(1-u) = -u^-1 / (1 - u^-1)
        inv = u.inverse()
        return geometric(inv, as_fraction(order) - inv.qexp) * inv * -1
    if u.sign == 1:
        raise PoleAtLatticePoint("denominator 1 - 1 in a partial-fraction sum")
    return ScaledSeries({0: Fraction(1, 2)})


def partial_fraction_sum(term: Callable[[int], Tuple[Monomial, Monomial]], order,
                         coeff: Callable[[int], Fraction] = None) -> ScaledSeries:
    """``sum_n c_n * num(n) / (1 - den(n))`` over all integers n.

    ``term(n)`` returns ``(num, den)`` monomials where ``num`` has a q-exponent
    growing quadratically in |n| and ``den`` one growing at most linearly.
    Terms are included until their leading exponent passes ``order``.
    """
    order = as_fraction(order)

    def lead(n):
        num, den = term(n)
        e = num.qexp
        if den.qexp < 0:
            e -= den.qexp
        return e

    total = ScaledSeries.zero(order)
    parts = []
    for direction in (1, -1):
        n = 0 if direction == 1 else -1
        above = 0
        while True:
            e = lead(n)
            if e < order:
                above = 0
                parts.append(n)
            else:
                above += 1
                # the lead exponent is eventually convex; a few consecutive
                # misses past the minimum mean we are done on this side
                if above > 3 and lead(n) > lead(n - direction):
                    break
            n += direction
            if abs(n) > 100000:
                raise RuntimeError("partial-fraction sum failed to converge")
    for n in parts:
        c = coeff(n) if coeff else 1
        if not c:
            continue
        num, den = term(n)
        g = geometric(den, order - num.qexp)
        total = total + (g * num) * c
    return total.truncate(order)


# ---------------------------------------------------------------------------
# identity catalog


def _mono(params, key, default=None) -> Monomial:
    v = params.get(key, default)
    return parse_monomial(v)


def _sum(terms):
    out = None
    for t in terms:
        out = t if out is None else out + t
    return out


def _jj(x: Monomial, M, W) -> ScaledSeries:
    return j_sum(x, M, W)


def _id_jtp(p, W):
    x, M = _mono(p, "x"), as_fraction(p.get("M", 1))
    return j_product(x, M, W), j_sum(x, M, W)


def _id_elliptic(p, W):
    x, n = _mono(p, "x"), int(p.get("n", 1))
    lhs = j_sum(q(n) * x, 1, W)
    pre = Monomial(-1 if n % 2 else 1, -binom2(n)) * x ** (-n)
    return lhs, j_sum(x, 1, W - pre.qexp) * pre


def _id_flip_q(p, W):
    x = _mono(p, "x")
    return j_sum(x, 1, W), j_sum(q(1) / x, 1, W)


def _id_flip_inv(p, W):
    x = _mono(p, "x")
    return j_sum(x, 1, W), j_sum(x.inverse(), 1, W - x.qexp) * (-x)


def _id_multisection(p, W):
    x, n = _mono(p, "x"), int(p.get("n", 2))
    W2 = W + 2 * n
    rhs = Jm(1, W2)
    for k in range(n):
        rhs = rhs * j_sum(q(k) * x, n, W2)
    rhs = rhs / Jm(n, W2) ** n
    return j_sum(x, 1, W), rhs


def _id_neg_base(p, W):
    x = _mono(p, "x")
    lhs = j_sum(x, 1, W, base_sign=-1)
    rhs = j_sum(x, 2, W) * j_sum(-q(1) * x, 2, W) / J(1, 4, W)
    return lhs, rhs


def _residue_part(x: Monomial, W, mod, res) -> ScaledSeries:
    """``sum_{n = res mod mod} (-1)^n q^C(n,2) x^n``."""
    d = _scale_of(x.qexp, W)
    out = {}
    for n in _j_index_range(x.qexp, Fraction(1), W):
        if n % mod != res:
            continue
        k = int((binom2(n) + n * x.qexp) * d)
        out[k] = out.get(k, 0) + parity(n) * (x.sign if n % 2 else 1)
    return ScaledSeries(out, d, _scaled_order(W, d))


def _id_power(p, W):
    x, n = _mono(p, "x"), int(p.get("n", 2))
    W2 = W + 2
    lhs = j_sum(x ** n, n, W)
    if n == 2:
        rhs = Jm(2, W2) * j_sum(x, 1, W2) * j_sum(-x, 1, W2) / Jm(1, W2) ** 2
    elif n == 3:
        # j(wx) j(w^2 x) with w a primitive cube root of unity, written through
        # the index classes of the triple-product sum.
        A = [_residue_part(x, W2, 3, r) for r in range(3)]
        pair = (A[0] * A[0] + A[1] * A[1] + A[2] * A[2]
                - A[0] * A[1] - A[0] * A[2] - A[1] * A[2])
        rhs = Jm(3, W2) * j_sum(x, 1, W2) * pair / Jm(1, W2) ** 3
    else:
        raise ValueError("power identity implemented for n = 2, 3")
    return lhs, rhs


def _id_jsplit(p, W):
    zz, m = _mono(p, "z"), int(p.get("m", 2))
    W2 = W + m * m
    terms = []
    for k in range(m):
        pre = Monomial(-1 if k % 2 else 1, binom2(k)) * zz ** k
        arg = Monomial(parity(m + 1), binom2(m) + m * k) * zz ** m
        terms.append(j_sum(arg, m * m, W2 - pre.qexp) * pre)
    return j_sum(zz, 1, W), _sum(terms)


def _id_jsplit_m2(p, W):
    zz = _mono(p, "z")
    rhs = j_sum(-q(1) * zz ** 2, 4, W) - j_sum(-q(3) * zz ** 2, 4, W - zz.qexp) * zz
    return j_sum(zz, 1, W), rhs


def _quintuple_sum(x, W):
    return j_sum(q(1) * x ** 3, 3, W) + j_sum(q(2) * x ** 3, 3, W - x.qexp) * x


def _quintuple_product(x, W):
    return j_sum(-x, 1, W) * j_sum(q(1) * x ** 2, 2, W) / Jm(2, W)


def _id_quintuple(p, W):
    x = _mono(p, "x")
    return _quintuple_sum(x, W), _quintuple_product(x, W)


def _id_quintuple_ratio(p, W):
    x = _mono(p, "x")
    return _quintuple_product(x, W), Jm(1, W) * j_sum(x ** 2, 1, W) / j_sum(x, 1, W)


def _id_reciprocal(p, W):
    zz = _mono(p, "z")

    def term(n):
        return (Monomial(-1 if n % 2 else 1, binom2(n + 1)), q(n) * zz)

    lhs = partial_fraction_sum(term, W)
    rhs = Jm(1, W) ** 3 / j_sum(zz, 1, W + 2)
    return lhs, rhs


def _id_h1_thm11(p, W):
    x, y = _mono(p, "x"), _mono(p, "y")
    lhs = j_sum(x, 1, W) * j_sum(y, 1, W)
    rhs = (j_sum(-x * y, 2, W) * j_sum(-q(1) * y / x, 2, W)
           - j_sum(-q(1) * x * y, 2, W) * j_sum(-(y / x), 2, W) * x)
    return lhs, rhs


def _id_h1_thm12a(p, W):
    x, y = _mono(p, "x"), _mono(p, "y")
    lhs = j_sum(-x, 1, W) * j_sum(y, 1, W) - j_sum(x, 1, W) * j_sum(-y, 1, W)
    rhs = j_sum(y / x, 2, W) * j_sum(q(1) * x * y, 2, W) * x * 2
    return lhs, rhs


def _id_h1_thm12b(p, W):
    x, y = _mono(p, "x"), _mono(p, "y")
    lhs = j_sum(-x, 1, W) * j_sum(y, 1, W) + j_sum(x, 1, W) * j_sum(-y, 1, W)
    rhs = j_sum(x * y, 2, W) * j_sum(q(1) * y / x, 2, W) * 2
    return lhs, rhs


def _id_theta_to_j(p, W):
    n, m = as_fraction(p.get("n", 1)), as_fraction(p.get("m", 2))
    return theta_series(n, m, W), theta_series_via_j(n, m, W)


def _id_eta(p, W):
    # Euler: eta = sum_n (-1)^n q^((6n+1)^2/24)
    terms = {}
    n = 0
    while True:
        hit = False
        for nn in (n, -n - 1):
            e = Fraction((6 * nn + 1) ** 2, 24)
            if e < W:
                terms[e] = terms.get(e, 0) + parity(nn)
                hit = True
        if not hit:
            break
        n += 1
    return eta(1, W), ScaledSeries.from_terms(terms, W)


def _pair(f, g):
    return lambda p, W: (f(W), g(W))


THETA_IDENTITIES: Dict[str, Callable] = {
    "jtp": _id_jtp,
    "j-elliptic": _id_elliptic,
    "j-flip-q": _id_flip_q,
    "j-flip-inv": _id_flip_inv,
    "j-multisection": _id_multisection,
    "j-neg-base": _id_neg_base,
    "j-power": _id_power,
    "jsplit": _id_jsplit,
    "jsplit-m2": _id_jsplit_m2,
    "quintuple": _id_quintuple,
    "quintuple-ratio": _id_quintuple_ratio,
    "reciprocal": _id_reciprocal,
    "h1-thm1.1": _id_h1_thm11,
    "h1-thm1.2a": _id_h1_thm12a,
    "h1-thm1.2b": _id_h1_thm12b,
    "theta-to-j": _id_theta_to_j,
    "eta-pentagonal": _id_eta,
    "rearrange-jbar01": _pair(lambda W: Jbar(0, 1, W), lambda W: 2 * Jbar(1, 4, W)),
    "rearrange-jbar14": _pair(lambda W: Jbar(1, 4, W), lambda W: Jprod({2: 2, 1: -1}, W)),
    "rearrange-jbar12": _pair(lambda W: Jbar(1, 2, W), lambda W: Jprod({2: 5, 1: -2, 4: -2}, W)),
    "rearrange-j12": _pair(lambda W: J(1, 2, W), lambda W: Jprod({1: 2, 2: -1}, W)),
    "rearrange-jbar13": _pair(lambda W: Jbar(1, 3, W), lambda W: Jprod({2: 1, 3: 2, 1: -1, 6: -1}, W)),
    "rearrange-j14": _pair(lambda W: J(1, 4, W), lambda W: Jprod({1: 1, 4: 1, 2: -1}, W)),
    "rearrange-j16": _pair(lambda W: J(1, 6, W), lambda W: Jprod({1: 1, 6: 2, 2: -1, 3: -1}, W)),
    "rearrange-jbar16": _pair(lambda W: Jbar(1, 6, W),
                              lambda W: Jprod({2: 2, 3: 1, 12: 1, 1: -1, 4: -1, 6: -1}, W)),
}


def verify_theta_identity(identity_id: str, params=None, order=50):
    """Check one catalogued theta identity; returns an IdentityResult."""
    params = dict(params or {})
    try:
        build = THETA_IDENTITIES[identity_id]
    except KeyError:
        raise KeyError(f"unknown theta identity {identity_id!r}") from None
    return check(identity_id, params, order, lambda W: build(params, W))
