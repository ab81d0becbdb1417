"""Truncated Laurent series in q (and q, z) with rational exponents.

A :class:`ScaledSeries` stores exponents as integers ``k`` that stand for
``k / scale``.  Coefficients are exact (``int`` or ``Fraction``).  Every series
carries ``valid_below`` (in scaled units): all coefficients with scaled
exponent strictly below it are known exactly, nothing is claimed above.
Exact polynomials use ``valid_below = inf``.

A :class:`BiSeries` is a Laurent series in ``z^(1/2)`` whose coefficients are
:class:`ScaledSeries`.  It stores a finite window of z-powers together with a
lower bound on the q-exponents of everything outside the window, which is
what the product certificate needs.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from .errors import (
    EmptySafeWindow,
    FractionalTwist,
    VanishingDenominator,
    ZeroLeadingCoefficient,
)

INF = math.inf
Number = Union[int, Fraction]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def _norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _scaled_order(order, scale: int):
    """Smallest scaled exponent that is not below ``order``."""
    if order == INF:
        return INF
    o = as_fraction(order) * scale
    return -((-o.numerator) // o.denominator)


def _scale_of(*values) -> int:
    d = 1
    for v in values:
        if v == INF:
            continue
        d = math.lcm(d, as_fraction(v).denominator)
    return d


@dataclass(frozen=True)
class Monomial:
    """``sign * q^qexp * z^zexp`` with ``sign`` in {1, -1}."""

    sign: int = 1
    qexp: Fraction = Fraction(0)
    zexp: Fraction = Fraction(0)

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("monomial sign must be +1 or -1")
        object.__setattr__(self, "qexp", as_fraction(self.qexp))
        z = as_fraction(self.zexp)
        if (2 * z).denominator != 1:
            raise ValueError("z exponent must be a half-integer")
        object.__setattr__(self, "zexp", z)

    def __mul__(self, other):
        if isinstance(other, Monomial):
            return Monomial(self.sign * other.sign, self.qexp + other.qexp,
                            self.zexp + other.zexp)
        if isinstance(other, ScaledSeries):
            return other * self
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Monomial):
            return self * other.inverse()
        return NotImplemented

    def __neg__(self):
        return Monomial(-self.sign, self.qexp, self.zexp)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("monomials only take integer powers")
        return Monomial(self.sign if n % 2 else 1, self.qexp * n, self.zexp * n)

    def inverse(self) -> "Monomial":
        return Monomial(self.sign, -self.qexp, -self.zexp)

    @property
    def is_scalar(self) -> bool:
        return self.zexp == 0

    def as_series(self) -> "ScaledSeries":
        if self.zexp != 0:
            raise ValueError("monomial involves z; use BiSeries.monomial")
        return ScaledSeries.monomial(self.qexp, self.sign)

    def __repr__(self):
        s = "-" if self.sign < 0 else ""
        z = f"*z^{self.zexp}" if self.zexp else ""
        return f"{s}q^{self.qexp}{z}"


def q(alpha=1) -> Monomial:
    """The monomial ``q^alpha``; negate it for ``-q^alpha``."""
    return Monomial(1, as_fraction(alpha))


def z(beta=1) -> Monomial:
    return Monomial(1, Fraction(0), as_fraction(beta))


class ScaledSeries:
    """Immutable truncated Laurent series in ``q^(1/scale)``."""

    __slots__ = ("scale", "_c", "valid_below", "_min")

    def __init__(self, coeffs: Mapping[int, Number] = None, scale: int = 1,
                 valid_below=INF, _trusted: bool = False):
        if scale < 1:
            raise ValueError("scale must be a positive integer")
        if valid_below != INF:
            valid_below = int(valid_below)
        coeffs = coeffs or {}
        if _trusted:
            c = coeffs
        else:
            c = {}
            for k, v in coeffs.items():
                if k >= valid_below or not v:
                    continue
                if not isinstance(v, (int, Fraction)):
                    raise TypeError("coefficients must be int or Fraction")
                c[int(k)] = _norm(v)
        g = scale
        if g > 1:
            if valid_below != INF:
                g = math.gcd(g, valid_below)
            for k in c:
                if g == 1:
                    break
                g = math.gcd(g, k)
            if g > 1:
                c = {k // g: v for k, v in c.items()}
                scale //= g
                if valid_below != INF:
                    valid_below //= g
        self.scale = scale
        self._c = c
        self.valid_below = valid_below
        self._min = min(c) if c else valid_below

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_terms(cls, terms: Mapping, order=INF) -> "ScaledSeries":
        """Build from ``{exponent: coefficient}`` with rational exponents."""
        exps = [as_fraction(e) for e in terms]
        d = _scale_of(*exps, order)
        vb = _scaled_order(order, d)
        return cls({int(as_fraction(e) * d): as_fraction(c) for e, c in terms.items()},
                   d, vb)

    @classmethod
    def monomial(cls, exp=0, coeff: Number = 1) -> "ScaledSeries":
        e = as_fraction(exp)
        return cls({e.numerator: coeff}, e.denominator)

    @classmethod
    def one(cls) -> "ScaledSeries":
        return cls({0: 1})

    @classmethod
    def zero(cls, order=INF) -> "ScaledSeries":
        d = _scale_of(order)
        return cls({}, d, _scaled_order(order, d))

    # -- inspection ---------------------------------------------------------

    @property
    def order(self):
        """``valid_below`` in units of q (a Fraction, or inf)."""
        if self.valid_below == INF:
            return INF
        return Fraction(self.valid_below, self.scale)

    @property
    def min_exp(self):
        """Smallest exponent with a nonzero coefficient, in units of q."""
        if self._min == INF:
            return INF
        return Fraction(self._min, self.scale)

    @property
    def is_exact(self) -> bool:
        return self.valid_below == INF

    def is_zero(self) -> bool:
        return not self._c

    def __len__(self):
        return len(self._c)

    def items(self) -> Iterator[Tuple[Fraction, Number]]:
        """(exponent, coefficient) pairs in increasing exponent order."""
        for k in sorted(self._c):
            yield Fraction(k, self.scale), self._c[k]

    def scaled_items(self, scale: int = None) -> List[Tuple[int, Number]]:
        if scale is None or scale == self.scale:
            return sorted(self._c.items())
        f = scale // self.scale
        if f * self.scale != scale:
            raise ValueError("target scale must be a multiple of the series scale")
        return sorted((k * f, v) for k, v in self._c.items())

    def coefficient(self, exp) -> Number:
        e = as_fraction(exp)
        if self.valid_below != INF and e >= self.order:
            raise ValueError(f"coefficient of q^{e} is beyond the known order {self.order}")
        k = e * self.scale
        if k.denominator != 1:
            return 0
        return self._c.get(k.numerator, 0)

    def _vb_at(self, scale: int):
        if self.valid_below == INF:
            return INF
        return self.valid_below * (scale // self.scale)

    def _min_at(self, scale: int):
        if self._min == INF:
            return INF
        return self._min * (scale // self.scale)

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self):
        return ScaledSeries({k: -v for k, v in self._c.items()}, self.scale,
                            self.valid_below, _trusted=True)

    def _coerce(self, other) -> "ScaledSeries":
        if isinstance(other, ScaledSeries):
            return other
        if isinstance(other, (int, Fraction)):
            return ScaledSeries({0: other})
        if isinstance(other, Monomial):
            return other.as_series()
        raise TypeError(f"cannot combine a series with {type(other).__name__}")

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return add(self, -other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return ScaledSeries({}, self.scale, self.valid_below)
            return ScaledSeries({k: _norm(v * other) for k, v in self._c.items()},
                                self.scale, self.valid_below, _trusted=True)
        if isinstance(other, Monomial):
            if other.zexp != 0:
                return NotImplemented
            return self.shift(other.qexp) * other.sign
        if isinstance(other, ScaledSeries):
            return mul(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / as_fraction(other))
        if isinstance(other, Monomial):
            return self * other.inverse()
        if isinstance(other, ScaledSeries):
            return divide(self, other)
        return NotImplemented

    def __rtruediv__(self, other):
        return divide(self._coerce(other), self)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return invert(self) ** (-n)
        result = ScaledSeries.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def shift(self, alpha) -> "ScaledSeries":
        """Multiply by ``q^alpha``."""
        a = as_fraction(alpha)
        if a == 0:
            return self
        d = math.lcm(self.scale, a.denominator)
        f = d // self.scale
        s = int(a * d)
        vb = INF if self.valid_below == INF else self.valid_below * f + s
        return ScaledSeries({k * f + s: v for k, v in self._c.items()}, d, vb,
                            _trusted=True)

    def truncate(self, order) -> "ScaledSeries":
        """Forget everything at or above ``order`` (units of q)."""
        d = _scale_of(order, Fraction(1, self.scale))
        vb = _scaled_order(order, d)
        mine = self._vb_at(d)
        vb = min(vb, mine)
        f = d // self.scale
        return ScaledSeries({k * f: v for k, v in self._c.items() if k * f < vb}, d, vb,
                            _trusted=True)

    def mul_binomial(self, coeff: Number, exp) -> "ScaledSeries":
        """Multiply by ``1 + coeff * q^exp`` (exact factor)."""
        return self * ScaledSeries({0: 1}) + (self.shift(exp) * coeff)

    def div_binomial(self, coeff: Number, exp) -> "ScaledSeries":
        """Divide by ``1 + coeff * q^exp`` where ``exp > 0``.

        Runs the recurrence ``b_n = a_n - coeff * b_{n-e}`` directly, which is
        much cheaper than a general inversion followed by a product.
        """
        e = as_fraction(exp)
        if e <= 0:
            raise ValueError("div_binomial needs a positive exponent")
        if self.valid_below == INF:
            raise ValueError("dividing an exact series by an infinite product needs an order")
        d = math.lcm(self.scale, e.denominator)
        f = d // self.scale
        step = int(e * d)
        src = {k * f: v for k, v in self._c.items()}
        vb = self.valid_below * f
        if not src:
            return ScaledSeries({}, d, vb)
        out: Dict[int, Number] = {}
        lo = min(src)
        # b_n only depends on b_{n - step}; walk each residue chain upward.
        for k in range(lo, vb):
            v = src.get(k, 0)
            prev = out.get(k - step)
            if prev:
                v = v - coeff * prev
            if v:
                out[k] = _norm(v) if type(v) is Fraction else v
        return ScaledSeries(out, d, vb, _trusted=True)

    # -- comparisons and text -----------------------------------------------

    def first_mismatch(self, other: "ScaledSeries", order=INF):
        """First exponent below the common order where the two differ.

        Returns ``None`` if they agree, else ``(exponent, lhs, rhs)``.
        """
        d = math.lcm(self.scale, other.scale, _scale_of(order))
        vb = min(self._vb_at(d), other._vb_at(d), _scaled_order(order, d))
        return _first_mismatch_at(self, other, d, vb)

    def equal_to_order(self, other: "ScaledSeries", order=INF) -> bool:
        return self.first_mismatch(other, order) is None

    def __eq__(self, other):
        if not isinstance(other, ScaledSeries):
            return NotImplemented
        return (self.scale == other.scale and self.valid_below == other.valid_below
                and self._c == other._c)

    def __hash__(self):
        return hash((self.scale, self.valid_below, frozenset(self._c.items())))

    def to_text(self) -> str:
        """Canonical text form, stable across runs."""
        vb = "inf" if self.valid_below == INF else str(self.valid_below)
        terms = ", ".join(f"({k}, {Fraction(v)})" for k, v in sorted(self._c.items()))
        return f"scale={self.scale}; valid_below={vb}; terms=[{terms}]"

    @classmethod
    def from_text(cls, text: str) -> "ScaledSeries":
        m = re.fullmatch(r"scale=(\d+); valid_below=(inf|-?\d+); terms=\[(.*)\]", text.strip())
        if not m:
            raise ValueError("not a canonical series text")
        scale = int(m.group(1))
        vb = INF if m.group(2) == "inf" else int(m.group(2))
        coeffs = {}
        for k, v in re.findall(r"\((-?\d+), (-?\d+(?:/\d+)?)\)", m.group(3)):
            coeffs[int(k)] = Fraction(v)
        return cls(coeffs, scale, vb)

    def __repr__(self):
        shown = []
        for e, c in list(self.items())[:8]:
            shown.append(f"{c}*q^{e}")
        more = " + ..." if len(self._c) > 8 else ""
        o = "exact" if self.valid_below == INF else f"O(q^{self.order})"
        return f"ScaledSeries({' + '.join(shown) or '0'}{more}; {o})"


def _first_mismatch_at(a: ScaledSeries, b: ScaledSeries, d: int, vb):
    fa, fb = d // a.scale, d // b.scale
    ca = {k * fa: v for k, v in a._c.items() if k * fa < vb}
    cb = {k * fb: v for k, v in b._c.items() if k * fb < vb}
    for k in sorted(set(ca) | set(cb)):
        x, y = ca.get(k, 0), cb.get(k, 0)
        if x != y:
            return Fraction(k, d), x, y
    return None


def add(a: ScaledSeries, b: ScaledSeries) -> ScaledSeries:
    """Sum, valid below the smaller of the two orders."""
    d = math.lcm(a.scale, b.scale)
    vb = min(a._vb_at(d), b._vb_at(d))
    out: Dict[int, Number] = {}
    for s in (a, b):
        f = d // s.scale
        for k, v in s._c.items():
            k *= f
            if k < vb:
                out[k] = out.get(k, 0) + v
    return ScaledSeries(out, d, vb)


def mul(a: ScaledSeries, b: ScaledSeries) -> ScaledSeries:
    """Product.  Valid below ``min(a.vb + b.min, b.vb + a.min)``."""
    d = math.lcm(a.scale, b.scale)
    A = a.scaled_items(d)
    B = b.scaled_items(d)
    amin, bmin = a._min_at(d), b._min_at(d)
    vb = min(a._vb_at(d) + bmin, b._vb_at(d) + amin)
    if len(A) > len(B):
        A, B = B, A
    out: Dict[int, Number] = {}
    get = out.get
    for ka, ca in A:
        lim = vb - ka
        for kb, cb in B:
            if kb >= lim:
                break
            k = ka + kb
            out[k] = get(k, 0) + ca * cb
    return ScaledSeries(out, d, vb)


def invert(a: ScaledSeries, order=None) -> ScaledSeries:
    """Multiplicative inverse by back-substitution.

    For an exact input the inverse is an infinite series, so ``order`` (in
    units of q) says how far to compute it.  For inexact inputs ``order`` only
    caps the work.
    """
    if a.is_zero():
        if a.is_exact:
            raise VanishingDenominator("division by an identically zero series")
        raise ZeroLeadingCoefficient(
            f"no nonzero coefficient below q^{a.order}; cannot invert")
    d = a.scale
    items = a.scaled_items()
    e0, c0 = items[0]
    if a.valid_below == INF and order is None:
        raise ValueError("inverting an exact series needs an explicit order")
    target = INF if a.valid_below == INF else a.valid_below - e0  # known range of 1/u
    if order is not None:
        d2 = math.lcm(d, _scale_of(order))
        if d2 != d:
            f = d2 // d
            items = [(k * f, v) for k, v in items]
            e0 *= f
            target = target * f if target != INF else INF
            d = d2
        target = min(target, _scaled_order(order, d) + e0)
    inv_c0 = Fraction(1) / as_fraction(c0)
    if len(items) == 1 and a.valid_below == INF:
        return ScaledSeries({-e0: _norm(inv_c0)}, d)
    rest = [(k - e0, v) for k, v in items[1:]]
    g = 0
    for k, _ in rest:
        g = math.gcd(g, k)
    g = g or 1
    steps = [(k // g, v) for k, v in rest]
    n_terms = -((-target) // g) if target > 0 else 0
    unit = inv_c0 == 1
    neg_unit = inv_c0 == -1
    b: List[Number] = [0] * max(n_terms, 0)
    if n_terms:
        b[0] = 1
    for n in range(1, n_terms):
        s = 0
        for k, v in steps:
            if k > n:
                break
            bv = b[n - k]
            if bv:
                s += v * bv
        if s:
            if unit:
                b[n] = -s
            elif neg_unit:
                b[n] = s
            else:
                b[n] = _norm(-s * inv_c0)
    out = {n * g - e0: _norm(v * inv_c0) for n, v in enumerate(b) if v}
    return ScaledSeries(out, d, target - e0, _trusted=False)


def divide(a: ScaledSeries, b: ScaledSeries, order=None) -> ScaledSeries:
    """``a / b``.  When ``b`` is exact the inverse is sized to ``a``'s order."""
    if b.is_zero():
        return invert(b)
    if b.is_exact and order is None:
        if a.is_exact:
            if len(b) == 1:
                return a * invert(b, 0)
            raise ValueError("dividing two exact series needs an explicit order")
        # a * (1/b) is valid below inv.vb + a.min; choose inv.vb so that this
        # does not limit the result below a.vb - b.min.
        need = a.order - a.min_exp - b.min_exp if not a.is_zero() else a.order - b.min_exp
        inv = invert(b, need)
        return a * inv
    return a * invert(b, order)


def substitute_power(a: ScaledSeries, k) -> ScaledSeries:
    """Replace q by q^k for a positive rational k."""
    k = as_fraction(k)
    if k <= 0:
        raise ValueError("substitution power must be positive")
    u, v = k.numerator, k.denominator
    vb = INF if a.valid_below == INF else a.valid_below * u
    return ScaledSeries({e * u: c for e, c in a._c.items()}, a.scale * v, vb, _trusted=True)


def _integral_view(a: ScaledSeries, what: str):
    if a.scale == 1:
        return dict(a._c), a.valid_below
    if any(k % a.scale for k in a._c):
        raise FractionalTwist(f"{what} needs integral exponents")
    vb = INF if a.valid_below == INF else -((-a.valid_below) // a.scale)
    return {k // a.scale: v for k, v in a._c.items()}, vb


def sign_twist(a: ScaledSeries) -> ScaledSeries:
    """Replace q by -q.  Only defined for integral exponents."""
    c, vb = _integral_view(a, "q -> -q")
    return ScaledSeries({k: (-v if k % 2 else v) for k, v in c.items()}, 1, vb, _trusted=True)


def dissect(a: ScaledSeries, modulus: int, residue: int) -> ScaledSeries:
    """Keep the terms whose integral exponent is ``residue`` mod ``modulus``."""
    if modulus < 1:
        raise ValueError("modulus must be positive")
    c, vb = _integral_view(a, "dissection")
    return ScaledSeries({k: v for k, v in c.items() if k % modulus == residue % modulus},
                        1, vb, _trusted=True)


def as_series(x) -> ScaledSeries:
    if isinstance(x, ScaledSeries):
        return x
    if isinstance(x, Monomial):
        return x.as_series()
    return ScaledSeries({0: as_fraction(x)})


# ---------------------------------------------------------------------------
# bivariate series


class BiSeries:
    """Laurent series in z^(1/2) with q-series coefficients.

    ``coeffs`` maps a scaled z-exponent ``k`` (meaning ``z^(k/2)``) to a
    :class:`ScaledSeries`.  Coefficients inside ``[zmin, zmax]`` are known
    below ``order`` (units of q); every term outside the window has q-exponent
    at least ``tail_floor``.  A series whose window holds every term below its
    order is called complete and has ``tail_floor >= order``.
    """

    ZSCALE = 2

    def __init__(self, coeffs: Mapping[int, ScaledSeries], zmin: int, zmax: int,
                 order, tail_floor=None):
        self.order = order if order == INF else as_fraction(order)
        self.tail_floor = self.order if tail_floor is None else (
            tail_floor if tail_floor == INF else as_fraction(tail_floor))
        self.zmin, self.zmax = int(zmin), int(zmax)
        self.coeffs: Dict[int, ScaledSeries] = {}
        for k, s in coeffs.items():
            if not self.zmin <= k <= self.zmax:
                raise ValueError("coefficient outside the declared window")
            s = s.truncate(self.order) if self.order != INF else s
            if not s.is_zero():
                self.coeffs[int(k)] = s

    @property
    def is_complete(self) -> bool:
        return self.tail_floor >= self.order

    def coefficient(self, zexp) -> ScaledSeries:
        k = as_fraction(zexp) * self.ZSCALE
        if k.denominator != 1:
            raise ValueError("z exponents are half-integers")
        k = k.numerator
        if not self.zmin <= k <= self.zmax and not self.is_complete:
            raise ValueError(f"z^{zexp} is outside the certified window")
        s = self.coeffs.get(k)
        if s is None:
            return ScaledSeries.zero(self.order)
        return s

    def floor(self):
        lows = [s.min_exp for s in self.coeffs.values()]
        return min(lows + [self.tail_floor])

    def window(self) -> Tuple[Fraction, Fraction]:
        return Fraction(self.zmin, 2), Fraction(self.zmax, 2)

    @classmethod
    def monomial(cls, m: Monomial, coeff: Number = 1) -> "BiSeries":
        k = int(m.zexp * 2)
        return cls({k: ScaledSeries.monomial(m.qexp, coeff * m.sign)}, k, k, INF, INF)

    def __neg__(self):
        return BiSeries({k: -s for k, s in self.coeffs.items()}, self.zmin, self.zmax,
                        self.order, self.tail_floor)

    def scale_by(self, factor) -> "BiSeries":
        """Multiply by a q-series, a number, or a monomial in q and z."""
        if isinstance(factor, Monomial):
            dk = int(factor.zexp * 2)
            qm = Monomial(factor.sign, factor.qexp)
            tf = self.tail_floor if self.tail_floor == INF else self.tail_floor + factor.qexp
            o = self.order if self.order == INF else self.order + factor.qexp
            return BiSeries({k + dk: s * qm for k, s in self.coeffs.items()},
                            self.zmin + dk, self.zmax + dk, o, tf)
        if isinstance(factor, (int, Fraction)):
            return BiSeries({k: s * factor for k, s in self.coeffs.items()},
                            self.zmin, self.zmax, self.order, self.tail_floor)
        if isinstance(factor, ScaledSeries):
            prods = {k: s * factor for k, s in self.coeffs.items()}
            fmin = factor.min_exp
            o = min([self.order + fmin if self.order != INF else INF,
                     factor.order + self.floor() if factor.order != INF else INF])
            tf = self.tail_floor + fmin if self.tail_floor != INF else INF
            return BiSeries(prods, self.zmin, self.zmax, o, tf)
        raise TypeError(f"cannot scale a BiSeries by {type(factor).__name__}")

    def __add__(self, other: "BiSeries") -> "BiSeries":
        return bi_add(self, other)

    def __sub__(self, other: "BiSeries") -> "BiSeries":
        return bi_add(self, -other)

    def __mul__(self, other):
        if isinstance(other, BiSeries):
            return bi_mul(self, other)
        return self.scale_by(other)

    __rmul__ = scale_by

    def first_mismatch(self, other: "BiSeries"):
        """Compare on the common certified window.

        Returns ``None`` or ``(zexp, qexp, lhs, rhs)``.
        """
        lo, hi = _common_window(self, other)
        o = min(self.order, other.order)
        for k in range(lo, hi + 1):
            a = self.coeffs.get(k, ScaledSeries.zero(o))
            b = other.coeffs.get(k, ScaledSeries.zero(o))
            mm = a.first_mismatch(b, o)
            if mm:
                return (Fraction(k, 2),) + mm
        return None

    def __repr__(self):
        return (f"BiSeries(z^[{Fraction(self.zmin, 2)}..{Fraction(self.zmax, 2)}], "
                f"O(q^{self.order}), tail>={self.tail_floor})")


def _certified(s: BiSeries, k: int, order) -> bool:
    return s.zmin <= k <= s.zmax or s.tail_floor >= order


def _common_window(a: BiSeries, b: BiSeries):
    o = min(a.order, b.order)
    lo_a, hi_a = (a.zmin, a.zmax)
    lo_b, hi_b = (b.zmin, b.zmax)
    if a.tail_floor >= o and b.tail_floor >= o:
        return min(lo_a, lo_b), max(hi_a, hi_b)
    if a.tail_floor >= o:
        return lo_b, hi_b
    if b.tail_floor >= o:
        return lo_a, hi_a
    return max(lo_a, lo_b), min(hi_a, hi_b)


def bi_add(a: BiSeries, b: BiSeries) -> BiSeries:
    o = min(a.order, b.order)
    lo, hi = _common_window(a, b)
    if lo > hi:
        raise EmptySafeWindow("the two windows do not overlap")
    out: Dict[int, ScaledSeries] = {}
    for s in (a, b):
        for k, c in s.coeffs.items():
            if lo <= k <= hi:
                out[k] = out[k] + c if k in out else c
    return BiSeries(out, lo, hi, o, min(a.tail_floor, b.tail_floor))


def bi_mul(a: BiSeries, b: BiSeries) -> BiSeries:
    """Product of two windowed bivariate series with a safe-window certificate.

    A z-coefficient of the product is kept only when no term outside either
    input window can reach it below the product's order.
    """
    fa, fb = a.floor(), b.floor()
    o = min(a.order + fb, b.order + fa)
    if a.tail_floor + b.tail_floor < o:
        raise EmptySafeWindow("both tails reach below the product order")
    lo, hi = a.zmin + b.zmin, a.zmax + b.zmax
    good = []
    for K in range(lo, hi + 1):
        ok = True
        for ka, ca in a.coeffs.items():
            kb = K - ka
            if not b.zmin <= kb <= b.zmax and ca.min_exp + b.tail_floor < o:
                ok = False
                break
        if ok:
            for kb, cb in b.coeffs.items():
                ka = K - kb
                if not a.zmin <= ka <= a.zmax and cb.min_exp + a.tail_floor < o:
                    ok = False
                    break
        good.append(ok)
    # Largest contiguous run of certified coefficients.
    best, start = (0, -1), None
    for i, ok in enumerate(good + [False]):
        if ok and start is None:
            start = i
        elif not ok and start is not None:
            if i - start > best[1] - best[0] + 1:
                best = (start, i - 1)
            start = None
    if best[1] < best[0]:
        raise EmptySafeWindow("no z-coefficient of the product is certified")
    zlo, zhi = lo + best[0], lo + best[1]
    out: Dict[int, ScaledSeries] = {}
    for ka, ca in a.coeffs.items():
        for kb, cb in b.coeffs.items():
            K = ka + kb
            if zlo <= K <= zhi:
                p = ca * cb
                out[K] = out[K] + p if K in out else p
    tail = fa + fb
    if a.tail_floor >= a.order and b.tail_floor >= b.order and zlo == lo and zhi == hi:
        tail = max(tail, o)
    return BiSeries({k: v.truncate(o) for k, v in out.items()}, zlo, zhi, o, tail)


def specialize_z(a: BiSeries, v: Monomial) -> ScaledSeries:
    """Substitute ``z = v`` for a scalar monomial ``v``.

    The order drops by the most negative ``qexp * zexp`` over the window.
    Terms outside the window are assumed not to reach below the result's
    order, which holds for complete theta-type inputs.
    """
    if v.zexp != 0:
        raise ValueError("specialization value must not involve z")
    total = ScaledSeries.zero(INF)
    drop = Fraction(0)
    for k in range(a.zmin, a.zmax + 1):
        zexp = Fraction(k, 2)
        drop = min(drop, v.qexp * zexp)
    o = a.order + drop if a.order != INF else INF
    for k, c in a.coeffs.items():
        zexp = Fraction(k, 2)
        if zexp.denominator != 1 and v.sign < 0:
            raise FractionalTwist("half-integer power of a negative specialization value")
        sign = v.sign ** int(zexp) if zexp.denominator == 1 else 1
        term = c.shift(v.qexp * zexp) * sign
        total = total + term
    return total.truncate(o) if o != INF else total
