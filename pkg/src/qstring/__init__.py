"""Exact q-series engine for admissible-level string functions and mock theta identities."""

from .errors import (
    DivergentProduct,
    EmptySafeWindow,
    FractionalTwist,
    InvalidLabel,
    NonGenericParameters,
    PoleAtLatticePoint,
    QSeriesError,
    UnboundedRegion,
    UndefinedNormalization,
    UnknownSuite,
    ZeroLeadingCoefficient,
)
from .series import (
    BiSeries,
    Monomial,
    ScaledSeries,
    bi_mul,
    dissect,
    invert,
    q,
    sign_twist,
    specialize_z,
    substitute_power,
    z,
)

__version__ = "0.1.0"
