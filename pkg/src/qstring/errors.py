"""Exception types raised by the series engine and the verification harness."""


class QSeriesError(Exception):
    """Base class for all errors raised by this package."""


class ZeroLeadingCoefficient(QSeriesError):
    """Tried to invert a series with no nonzero coefficient below its order."""


class FractionalTwist(QSeriesError):
    """q -> -q was requested on a series with fractional exponents."""


class EmptySafeWindow(QSeriesError):
    """A bivariate product has no z-coefficient free of truncation error."""


class DivergentProduct(QSeriesError):
    """An infinite product has infinitely many non-positive exponents."""


class NonGenericParameters(QSeriesError):
    """The chosen parameters land on a zero or a pole of the identity."""


class PoleAtLatticePoint(NonGenericParameters):
    """An Appell-type sum has a denominator equal to zero."""


class VanishingDenominator(ZeroLeadingCoefficient, NonGenericParameters):
    """Division by a series that is identically zero."""


class UnboundedRegion(QSeriesError):
    """The exponent of a double sum is not bounded below on a summation cone."""


class UndefinedNormalization(QSeriesError):
    """The normalizing exponent involves division by a zero level."""


class InvalidLabel(QSeriesError):
    """A string-function label is outside the admissible range."""


class UnknownSuite(QSeriesError):
    """No verification suite is registered under the given name."""
