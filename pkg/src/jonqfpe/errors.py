"""Exception hierarchy shared by every module of the package."""


class JonqError(Exception):
    """Base class for all library errors."""


class NotPrimeError(JonqError, ValueError):
    """A modulus that must be prime is composite (or out of range)."""


class ZeroInverseError(JonqError, ZeroDivisionError):
    pass


class ArityError(JonqError, ValueError):
    """A point has fewer coordinates than a polynomial reads."""


class DegreeError(JonqError, ValueError):
    pass


class VariableError(JonqError, ValueError):
    """A monomial references a variable outside the allowed prefix."""


class DimensionMismatch(JonqError, ValueError):
    pass


class InvalidAutomorphism(JonqError, ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class FactorMismatch(JonqError, ValueError):
    pass


class DuplicatePrime(JonqError, ValueError):
    pass


class OutOfRange(JonqError, ValueError):
    pass


class DigitOverflow(JonqError, ValueError):
    pass


class KeyFormatError(JonqError, ValueError):
    """Base for key-file parse failures."""


class KeySyntaxError(KeyFormatError):
    pass


class KeyValidationError(KeyFormatError):
    pass


class KeyVersionError(KeyFormatError):
    pass


class TooLarge(JonqError, ValueError):
    """An exhaustive computation would exceed its guard."""
