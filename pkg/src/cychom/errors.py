"""Exception hierarchy shared by all cychom modules."""


class CychomError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(CychomError):
    """Matrix or complex shapes do not line up."""


class CompositionNonzero(CychomError):
    """A pair of maps that must compose to zero does not."""


class TruncationTooTight(CychomError):
    """A homology degree was requested beyond the built range of a complex."""


class InvalidModulus(CychomError):
    """A modulus parameter was < 2."""


class InvalidParams(CychomError):
    """Numeric parameters out of their allowed domain (non-prime p, n < 1, ...)."""


class NotAChainMap(CychomError):
    """A map of complexes fails to commute with the differentials."""


class NotDivisible(CychomError):
    """A reduction map was requested between non-divisible moduli."""


class BoundTooSmall(CychomError):
    """A degree bound is too small for the requested computation."""


class UnsupportedFiltration(CychomError):
    """A filtered group does not have the split free structure an operation needs."""


class OutOfRange(CychomError):
    """A degree outside the range the K-group formula covers."""


class RangeEmpty(CychomError):
    """The K-table range 1 <= i <= p-3 is empty (p <= 3)."""


class ParseError(CychomError):
    """A structured input file could not be parsed."""
