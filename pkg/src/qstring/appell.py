"""The Appell-Lerch sum m(x, z; q) and its standard properties."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict

from .errors import PoleAtLatticePoint
from .series import Monomial, ScaledSeries, as_fraction, q
from .theta import Jm, binom2, j_sum, parity, partial_fraction_sum
from .verify import check, parse_monomial


def appell_pole(x: Monomial, zz: Monomial, qmod=1) -> bool:
    """True when some denominator ``1 - Q^(r-1) x z`` vanishes (``Q = q^qmod``)."""
    M = as_fraction(qmod)
    u = x * zz
    return u.sign == 1 and (u.qexp / M).denominator == 1


def appell_h(x, zz, qmod=1, order=20) -> ScaledSeries:
    """``j(z;Q) m(x,z;Q) = sum_r (-1)^r Q^C(r,2) z^r / (1 - Q^(r-1) x z)``.

    This sum stays finite where ``j(z;Q)`` vanishes, which is what callers
    need when an identity multiplies m by a theta function equal to j(z;Q).
    """
    x, zz = parse_monomial(x), parse_monomial(zz)
    M = as_fraction(qmod)
    if appell_pole(x, zz, M):
        raise PoleAtLatticePoint(f"m({x}, {zz}; q^{M}) has a vanishing denominator")

    def term(r):
        num = Monomial(parity(r), M * binom2(r)) * zz ** r
        return num, Monomial(1, M * (r - 1)) * x * zz

    return partial_fraction_sum(term, order)


def appell_pole_index(x: Monomial, zz: Monomial, qmod=1):
    """The r with ``Q^(r-1) x z = 1``, or None."""
    M = as_fraction(qmod)
    if not appell_pole(x, zz, M):
        return None
    return int(1 - (x * zz).qexp / M)


def appell_h_regular(x, zz, qmod=1, order=20) -> ScaledSeries:
    """``appell_h`` with the single vanishing-denominator summand left out."""
    x, zz = parse_monomial(x), parse_monomial(zz)
    M = as_fraction(qmod)
    r0 = appell_pole_index(x, zz, M)

    def term(r):
        num = Monomial(parity(r), M * binom2(r)) * zz ** r
        return num, Monomial(1, M * (r - 1)) * x * zz

    return partial_fraction_sum(term, order, coeff=lambda r: 0 if r == r0 else 1)


def appell_m(x, zz, qmod=1, order=20) -> ScaledSeries:
    """``m(x, z; q^qmod)`` valid below ``order``."""
    x, zz = parse_monomial(x), parse_monomial(zz)
    M = as_fraction(qmod)
    order = as_fraction(order)
    den = j_sum(zz, M, order + 2)
    if den.is_zero():
        raise PoleAtLatticePoint(f"j({zz}; q^{M}) vanishes, so m is undefined")
    lead = den.min_exp
    h = appell_h(x, zz, M, order + lead)
    return (h / j_sum(zz, M, order + 2 * abs(lead) + 2)).truncate(order)


def m_ratio_form(x, zz, qmod, order) -> ScaledSeries:
    return appell_m(x, zz, qmod, order)


# ---------------------------------------------------------------------------
# property catalog; every entry builds (lhs, rhs) at working order W


def _xz(p):
    return (parse_monomial(p.get("x", "-q^1/2")), parse_monomial(p.get("z", "-q^1/3")),
            as_fraction(p.get("qmod", 1)))


def _p_z_period(p, W):
    x, zz, M = _xz(p)
    return appell_m(x, zz, M, W), appell_m(x, Monomial(1, M) * zz, M, W)


def _p_x_inversion(p, W):
    x, zz, M = _xz(p)
    rhs = appell_m(x.inverse(), zz.inverse(), M, W + x.qexp) * x.inverse()
    return appell_m(x, zz, M, W), rhs


def _p_x_shift(p, W):
    x, zz, M = _xz(p)
    lhs = appell_m(Monomial(1, M) * x, zz, M, W)
    rhs = 1 - appell_m(x, zz, M, W - x.qexp) * x
    return lhs, rhs


def _p_flip_xz(p, W):
    x, zz, M = _xz(p)
    return appell_m(x, zz, M, W), appell_m(x, (x * zz).inverse(), M, W)


def changing_z_difference(x: Monomial, z0: Monomial, z1: Monomial, M, W) -> ScaledSeries:
    """``z0 J^3 j(z1/z0) j(x z0 z1) / (j(z0) j(z1) j(x z0) j(x z1))`` with base q^M."""
    W2 = W + 4 * M + abs(z0.qexp) + abs(z1.qexp) + abs(x.qexp) + 4
    num = Jm(M, W2) ** 3 * j_sum(z1 / z0, M, W2) * j_sum(x * z0 * z1, M, W2)
    den = j_sum(z0, M, W2) * j_sum(z1, M, W2) * j_sum(x * z0, M, W2) * j_sum(x * z1, M, W2)
    return (num / den) * z0


def _p_changing_z(p, W):
    x, z0, M = _xz(p)
    z1 = parse_monomial(p.get("z1", "-q^2/3"))
    lhs = appell_m(x, z1, M, W) - appell_m(x, z0, M, W)
    return lhs, changing_z_difference(x, z0, z1, M, W).truncate(W)


def m_split_rhs(n: int, x: Monomial, zz: Monomial, zp: Monomial, M, W) -> ScaledSeries:
    """Right side of the n-fold splitting of m(x, z; q^M) with new variable z'."""
    M = as_fraction(M)
    Q = lambda e: Monomial(1, M * e)
    mx = -x
    W2 = W + 2 * M * n * n + 4 * (abs(x.qexp) + abs(zz.qexp) + abs(zp.qexp)) * n + 4
    first = None
    for r in range(n):
        pre = Q(-binom2(r + 1)) * mx ** r
        arg = -(Q(binom2(n) - n * r) * mx ** n)
        t = appell_m(arg, zp, M * n * n, W - pre.qexp) * pre
        first = t if first is None else first + t
    inner = None
    for r in range(n):
        pre = Q(binom2(r)) * (-(x * zz)) ** r
        t = (j_sum(-(Q(binom2(n) + r) * mx ** n * zz * zp), M * n, W2)
             * j_sum(Q(n * r) * zz ** n / zp, M * n * n, W2))
        d = (j_sum(-(Q(binom2(n)) * mx ** n * zp), M * n, W2)
             * j_sum(Q(r) * zz, M * n, W2))
        t = (t / d) * pre
        inner = t if inner is None else inner + t
    scale = Jm(M * n, W2) ** 3 / (j_sum(x * zz, M, W2) * j_sum(zp, M * n * n, W2))
    second = (scale * inner) * zp
    return first + second


def _p_m_split(p, W):
    x, zz, M = _xz(p)
    n = int(p.get("n", 2))
    zp = parse_monomial(p.get("zprime", "-q^1/5"))
    return appell_m(x, zz, M, W), m_split_rhs(n, x, zz, zp, M, W).truncate(W)


APPELL_PROPERTIES: Dict[str, Callable] = {
    "z-period": _p_z_period,
    "x-inversion": _p_x_inversion,
    "x-shift": _p_x_shift,
    "flip-xz": _p_flip_xz,
    "changing-z": _p_changing_z,
    "m-split": _p_m_split,
}


def verify_appell_property(prop_id: str, params=None, order=50):
    params = dict(params or {})
    try:
        build = APPELL_PROPERTIES[prop_id]
    except KeyError:
        raise KeyError(f"unknown Appell property {prop_id!r}") from None
    return check(prop_id, params, order, lambda W: build(params, W))
