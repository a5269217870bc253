"""Exception hierarchy shared by all modules."""


class ConeEigError(Exception):
    """Base class for every error raised by coneeig."""


class DivisionByZeroInterval(ConeEigError, ZeroDivisionError):
    """The divisor interval (or rectangle) contains zero."""


class ParseError(ConeEigError, ValueError):
    """Malformed numeric literal or input document."""


class DimensionMismatch(ConeEigError, ValueError):
    pass


class IndexOutOfRange(ConeEigError, IndexError):
    pass


class SingularPivot(ConeEigError, ArithmeticError):
    """Interval elimination found no pivot candidate excluding zero."""

    def __init__(self, column, message=None):
        self.column = column
        super().__init__(message or f"every pivot candidate in column {column} contains 0")


class ExBoundUnavailable(ConeEigError):
    """The expansion bound needs an inverse that could not be enclosed."""


class ZeroDenominator(ConeEigError, ZeroDivisionError):
    pass


class ZeroLeadingCoefficient(ConeEigError, ValueError):
    pass


class NoConvergence(ConeEigError):
    """The floating-point eigensolver hit its iteration cap.

    ``partial`` holds whatever was computed (an ``ApproxEigenSet`` or None).
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class VerificationFailure(ConeEigError):
    """No certificate could be produced for eigenpair ``k``.

    This is the sound negative outcome: nothing is claimed.
    """

    def __init__(self, k, reason):
        self.k = k
        self.reason = reason
        super().__init__(f"index {k}: {reason}")
