"""Hecke-type double sums f_{a,b,c}(x, y; q) and their Appell-function expansion."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterator, Tuple

from .appell import appell_m
from .errors import UnboundedRegion
from .series import INF, Monomial, ScaledSeries, _scale_of, _scaled_order, as_fraction, q
from .theta import Jm, binom2, j_sum, parity
from .verify import check, parse_monomial


def signed_range(lo: int, hi: int) -> Tuple[int, range]:
    """Sum convention: ``sum_{r=lo}^{hi} = -sum_{r=hi+1}^{lo-1}`` when hi < lo."""
    if hi >= lo:
        return 1, range(lo, hi + 1)
    return -1, range(hi + 1, lo)


def _cone(a, b, c, alpha, beta, negative: bool, order) -> Iterator[Tuple[int, int, Fraction]]:
    """Lattice points of one summation cone whose exponent is below ``order``.

    The positive cone is r, s >= 0; the negative one r, s < 0, walked as
    r = -1 - u, s = -1 - v with u, v >= 0.
    """

    def rs(u, v):
        return (-1 - u, -1 - v) if negative else (u, v)

    def E(u, v):
        r, s = rs(u, v)
        return a * binom2(r) + b * r * s + c * binom2(s) + r * alpha + s * beta

    u = 0
    while True:
        g0, g1 = E(u, 0), E(u, 1)
        lin = g1 - g0 - Fraction(c, 2)
        vstar = -lin / c
        vmin = max(0, math.floor(vstar))
        best = min(E(u, vmin), E(u, vmin + 1)) if vmin >= 0 else g0
        best = min(best, g0)
        if best < order:
            v = vmin
            while v >= 0 and E(u, v) < order:
                yield (*rs(u, v), E(u, v))
                v -= 1
            v = vmin + 1
            while E(u, v) < order:
                yield (*rs(u, v), E(u, v))
                v += 1
        # Once v = 0 minimizes and E(u, 0) is increasing, later u cannot help.
        if g1 >= g0 and E(u + 1, 0) >= g0 and best >= order:
            break
        u += 1


def hecke_f(a: int, b: int, c: int, x, y, order) -> ScaledSeries:
    """``f_{a,b,c}(x, y; q)`` summed over both cones, valid below ``order``."""
    if a <= 0 or c <= 0 or b < 0:
        raise UnboundedRegion("need a, c > 0 and b >= 0 for bounded summation cones")
    x, y = parse_monomial(x), parse_monomial(y)
    order = as_fraction(order)
    d = _scale_of(x.qexp, y.qexp, order)
    vb = _scaled_order(order, d)
    out: Dict[int, int] = {}
    for negative in (False, True):
        for r, s, e in _cone(a, b, c, x.qexp, y.qexp, negative, order):
            sgn = parity(r + s) * (x.sign if r % 2 else 1) * (y.sign if s % 2 else 1)
            if negative:
                sgn = -sgn
            k = int(e * d)
            out[k] = out.get(k, 0) + sgn
    return ScaledSeries(out, d, vb)


def functional_equation_rhs(a, b, c, x: Monomial, y: Monomial, ell: int, k: int, W
                            ) -> ScaledSeries:
    """Right side of the (ell, k) shift relation for f_{a,b,c}."""
    pre = (-x) ** ell * (-y) ** k * Monomial(1, a * binom2(ell) + b * ell * k + c * binom2(k))
    shifted = hecke_f(a, b, c, Monomial(1, a * ell + b * k) * x,
                      Monomial(1, b * ell + c * k) * y, W - pre.qexp) * pre
    total = shifted
    sgn, rng = signed_range(0, ell - 1)
    for m in rng:
        t = (-x) ** m * Monomial(1, a * binom2(m))
        total = total + j_sum(Monomial(1, m * b) * y, c, W - t.qexp) * t * sgn
    sgn, rng = signed_range(0, k - 1)
    for m in rng:
        t = (-y) ** m * Monomial(1, c * binom2(m))
        total = total + j_sum(Monomial(1, m * b) * x, a, W - t.qexp) * t * sgn
    return total


def m_abc(a, b, c, x, y, z1, z0, order) -> ScaledSeries:
    """Appell-function part of the expansion of f_{a,b,c} (positive discriminant)."""
    x, y = parse_monomial(x), parse_monomial(y)
    z1, z0 = parse_monomial(z1), parse_monomial(z0)
    D = b * b - a * c
    W = as_fraction(order)
    total = ScaledSeries.zero(W)
    for t in range(a):
        pre = (-y) ** t * Monomial(1, c * binom2(t))
        arg = -(Monomial(1, a * binom2(b + 1) - c * binom2(a + 1) - t * D) * (-y) ** a
                / (-x) ** b)
        th = j_sum(Monomial(1, b * t) * x, a, W + 4 - pre.qexp)
        mm = appell_m(arg, z0, a * D, W + 4 - pre.qexp - th.min_exp if not th.is_zero() else W)
        total = total + (th * mm) * pre
    for t in range(c):
        pre = (-x) ** t * Monomial(1, a * binom2(t))
        arg = -(Monomial(1, c * binom2(b + 1) - a * binom2(c + 1) - t * D) * (-x) ** c
                / (-y) ** b)
        th = j_sum(Monomial(1, b * t) * y, c, W + 4 - pre.qexp)
        mm = appell_m(arg, z1, c * D, W + 4 - pre.qexp - th.min_exp if not th.is_zero() else W)
        total = total + (th * mm) * pre
    return total


def theta_abc(a, b, c, x, y, order) -> ScaledSeries:
    """Theta-quotient correction term of the positive-discriminant expansion."""
    x, y = parse_monomial(x), parse_monomial(y)
    D = b * b - a * c
    W = as_fraction(order)
    mx, my = -x, -y
    half = Fraction(1, 2)
    fc, fa = (half if c % 2 else 0), (half if a % 2 else 0)
    Wt = W + 6 * (abs(x.qexp) + abs(y.qexp) + 2) * b * b
    total = ScaledSeries.zero(W)
    for ds in range(b):
        for es in range(b):
            d, e = ds + fc, es + fa
            A = int(d - Fraction(c, 2))
            B = int(e + Fraction(a, 2))
            pre = Monomial(1, a * binom2(A) + b * A * B + c * binom2(B)) * mx ** A * my ** B
            inner = None
            for f in range(b):
                ip = (Monomial(1, a * b * b * binom2(f)
                               + (a * (b * d + b * b + c * e) - Fraction(a * c * (b + 1), 2)) * f)
                      * my ** (a * f))
                t1 = j_sum(-(Monomial(1, c * (a * d + b * e + Fraction(a * (b - 1), 2) + a * b * f))
                             * mx ** c), c * b * b, Wt)
                t2 = j_sum(-(Monomial(1, a * ((d + Fraction(b * (b + 1), 2) + b * f) * (b * b - a * c)
                                              + Fraction(c * (a - b), 2)))
                             * mx ** (-a * c) * my ** (a * b)), a * b * b * D, Wt)
                t = (t1 * t2) * ip
                inner = t if inner is None else inner + t
            num = Jm(b * D, Wt) ** 3 * j_sum(
                Monomial(1, D * (d + e) + a * c - Fraction(b * (a + c), 2)) * mx ** (b - c)
                * my ** (b - a), b * D, Wt)
            den = (j_sum(Monomial(1, D * e + Fraction(a * (c - b), 2)) * mx ** b * my ** (-a),
                         b * D, Wt)
                   * j_sum(Monomial(1, D * d + Fraction(c * (a - b), 2)) * my ** b * mx ** (-c),
                           b * D, Wt))
            total = total + ((inner * num) / den) * pre
    return total


def pos_disc_rhs(a, b, c, x, y, order) -> ScaledSeries:
    """``m_{a,b,c}(x, y, -1, -1) + theta_abc / (j(-1; q^(aD)) j(-1; q^(cD)))``."""
    D = b * b - a * c
    W = as_fraction(order)
    m1 = Monomial(-1, 0)
    corr = theta_abc(a, b, c, x, y, W + 2) / (j_sum(m1, a * D, W + 2) * j_sum(m1, c * D, W + 2))
    return m_abc(a, b, c, x, y, m1, m1, W) + corr


def _xy(p):
    return (int(p.get("a", 1)), int(p.get("b", 2)), int(p.get("c", 1)),
            parse_monomial(p.get("x", "q^3/2")), parse_monomial(p.get("y", "-q^5/2")))


def _h_functional(p, W):
    a, b, c, x, y = _xy(p)
    ell, k = int(p.get("ell", 1)), int(p.get("k", 1))
    return hecke_f(a, b, c, x, y, W), functional_equation_rhs(a, b, c, x, y, ell, k, W)


def _h_pos_disc(p, W):
    a, b, c, x, y = _xy(p)
    if b * b - a * c <= 0:
        raise ValueError("positive discriminant required")
    return hecke_f(a, b, c, x, y, W), pos_disc_rhs(a, b, c, x, y, W)


HECKE_IDENTITIES = {
    "functional-equation": _h_functional,
    "pos-disc": _h_pos_disc,
}


def verify_hecke_identity(identity_id: str, params=None, order=40):
    params = dict(params or {})
    build = HECKE_IDENTITIES[identity_id]
    return check(identity_id, params, order, lambda W: build(params, W))


def verify_pos_disc(a, b, c, x, y, order=40):
    return verify_hecke_identity("pos-disc", {"a": a, "b": b, "c": c, "x": x, "y": y}, order)


def verify_functional_equation(a, b, c, x, y, ell, k, order=40):
    return verify_hecke_identity("functional-equation",
                                 {"a": a, "b": b, "c": c, "x": x, "y": y, "ell": ell, "k": k},
                                 order)
