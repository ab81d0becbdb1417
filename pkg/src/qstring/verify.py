"""Shared machinery for checking an identity between two series to a given order."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Optional, Tuple, Union

from .errors import NonGenericParameters, QSeriesError
from .series import INF, BiSeries, Monomial, ScaledSeries, as_fraction

Side = Union[ScaledSeries, BiSeries]
Builder = Callable[[Fraction], Tuple[Side, Side]]

PASS, FAIL, SKIPPED, ERROR = "pass", "fail", "skipped-nongeneric", "error"


@dataclass
class IdentityResult:
    identity_id: str
    params: Dict[str, Any]
    order: Fraction
    status: str
    first_mismatch: Optional[Dict[str, str]] = None
    message: str = ""
    checked_to: Optional[Fraction] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_json(self) -> Dict[str, Any]:
        out = {
            "identity_id": self.identity_id,
            "params": {k: _jsonable(v) for k, v in self.params.items()},
            "order": str(self.order),
            "status": self.status,
        }
        if self.first_mismatch is not None:
            out["first_mismatch"] = self.first_mismatch
        if self.message:
            out["message"] = self.message
        if self.checked_to is not None:
            out["checked_to"] = str(self.checked_to)
        out.update({k: _jsonable(v) for k, v in self.extra.items()})
        return out


def _jsonable(v):
    if isinstance(v, Monomial):
        return format_monomial(v)
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


def format_monomial(m: Monomial) -> str:
    s = "-" if m.sign < 0 else ""
    out = f"{s}q^{m.qexp}"
    if m.zexp:
        out += f"*z^{m.zexp}"
    return out


_MONO = re.compile(r"^\s*([+-]?)\s*(?:q(?:\^\(?\s*(-?\d+(?:/\d+)?)\s*\)?)?|1)\s*$")


def parse_monomial(spec) -> Monomial:
    """Accept ``"-q^3/2"``, ``"q"``, ``"-1"``, a Monomial or a ``{sign, qexp}`` dict."""
    if isinstance(spec, Monomial):
        return spec
    if isinstance(spec, dict):
        return Monomial(int(spec.get("sign", 1)), as_fraction(str(spec.get("qexp", 0))),
                        as_fraction(str(spec.get("zexp", 0))))
    if isinstance(spec, int) and spec in (1, -1):
        return Monomial(spec, Fraction(0))
    m = _MONO.match(str(spec))
    if not m:
        raise ValueError(f"cannot parse monomial {spec!r}")
    sign = -1 if m.group(1) == "-" else 1
    if "q" not in str(spec):
        return Monomial(sign, Fraction(0))
    e = Fraction(m.group(2)) if m.group(2) else Fraction(1)
    return Monomial(sign, e)


def check(identity_id: str, params: Dict[str, Any], order, build: Builder,
          max_attempts: int = 6) -> IdentityResult:
    """Evaluate both sides, raising the working order until both reach ``order``.

    Non-generic parameters become ``skipped-nongeneric``; any other library
    error becomes ``error``.  Nothing is silently dropped.
    """
    order = as_fraction(order)
    work = order
    try:
        for _ in range(max_attempts):
            lhs, rhs = build(work)
            reached = min(lhs.order, rhs.order)
            if reached >= order:
                break
            work = work + (order - reached) + 1
        else:
            return IdentityResult(identity_id, params, order, ERROR,
                                  message=f"could not reach order {order} (got {reached})")
    except NonGenericParameters as exc:
        return IdentityResult(identity_id, params, order, SKIPPED, message=str(exc))
    except QSeriesError as exc:
        return IdentityResult(identity_id, params, order, ERROR,
                              message=f"{type(exc).__name__}: {exc}")
    return compare(identity_id, params, order, lhs, rhs)


def compare(identity_id: str, params: Dict[str, Any], order, lhs: Side, rhs: Side
            ) -> IdentityResult:
    order = as_fraction(order)
    if isinstance(lhs, BiSeries) or isinstance(rhs, BiSeries):
        mm = lhs.first_mismatch(rhs)
        if mm is None:
            return IdentityResult(identity_id, params, order, PASS,
                                  checked_to=min(lhs.order, rhs.order))
        zexp, exp, a, b = mm
        return IdentityResult(identity_id, params, order, FAIL,
                              first_mismatch={"zexp": str(zexp), "exponent": str(exp),
                                              "lhs": str(a), "rhs": str(b)})
    mm = lhs.first_mismatch(rhs, order)
    if mm is None:
        return IdentityResult(identity_id, params, order, PASS, checked_to=order)
    exp, a, b = mm
    return IdentityResult(identity_id, params, order, FAIL,
                          first_mismatch={"exponent": str(exp), "lhs": str(a), "rhs": str(b)})
