"""Exceptions raised by posilab."""

import re
from typing import Optional


class PosilabException(Exception):
    """Base exception for all posilab errors."""

    @property
    def code(self) -> str:
        """Snake case name of the exception, used in structured error output."""
        return re.sub(r"(?<!^)(?=[A-Z])", "_", type(self).__name__).lower()


class InvalidMap(PosilabException):
    """Coefficients do not describe a linear-fractional map."""


class AllZeroCoefficients(InvalidMap):
    """All four coefficients vanish."""


class ZeroDenominatorMap(InvalidMap):
    """The denominator cz + d vanishes identically."""


class ConstantMapNotInvertible(PosilabException):
    """A constant map has no inverse."""


class EvaluationAtPole(PosilabException):
    """A finite value was requested at the pole of a map."""


class IdentityMapAllFixed(PosilabException):
    """Every point is fixed by the identity map."""


class ConstantMap(PosilabException):
    """Operation is undefined for constant maps."""


class NotASelfmap(PosilabException):
    """The map does not send the unit disk into itself."""


class NotAnAutomorphism(PosilabException):
    """The map is not an automorphism of the unit disk."""


class NotDilationType(PosilabException):
    """The map has no fixed point inside the unit disk."""


class NoBoundaryFixedPoint(PosilabException):
    """The map has no fixed point on the unit circle."""


class InvalidParameter(PosilabException):
    """A map family parameter is outside its admissible range."""


class PoleInClosedDisk(PosilabException):
    """A power series was requested for a function with a pole in the closed disk."""


class WitnessUndefined(PosilabException):
    """The requested factorization only exists for the other verdict."""


class AlphaOutsideDisk(PosilabException):
    """A reproducing kernel was requested for a point outside the disk."""


class InternalCrossCheckMismatch(PosilabException):
    """The two decision routes disagree."""


class MapSpecError(PosilabException):
    """A map specification could not be turned into a map."""


class ParseError(MapSpecError):
    """The map specification is syntactically broken."""

    def __init__(self, message: str, position: Optional[int] = None):
        """Store the offending position next to the message.

        Args:
            message: Human readable description.
            position: Character offset in the specification text.
        """
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class ValidationError(MapSpecError):
    """The map specification is well formed but violates a precondition."""
