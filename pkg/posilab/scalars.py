"""Complex scalars with an exact rational and a float64 backend.

A `Cplx` holds both parts either as `Fraction` (exact backend) or as `float`
(float backend). Mixing the two yields a float. Decisions on floats go through
`compare`, which treats values within `Config.conf["eps"]` as equal and records
such boundary-marginal decisions for the caller.
"""

import cmath
import logging
import math
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Union

from posilab.exceptions import InvalidParameter
from posilab.util.config import Config

log = logging.getLogger(__name__)

Real = Union[Fraction, float]
Number = Union[int, Fraction, float, complex, "Cplx"]

_marginal_hits: "ContextVar[Optional[List[str]]]" = ContextVar(
    "marginal_hits", default=None
)


def _coerce_real(value: Union[int, Fraction, float]) -> Real:
    if isinstance(value, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, (Fraction, float)):
        return value
    raise TypeError(f"Unsupported real scalar {value!r}")


@dataclass(frozen=True)
class Cplx:
    """Immutable complex scalar.

    Attributes:
        re: Real part, `Fraction` or `float`.
        im: Imaginary part, same type as `re`.
    """

    re: Real
    im: Real = Fraction(0)

    def __post_init__(self):
        re, im = _coerce_real(self.re), _coerce_real(self.im)
        if isinstance(re, float) or isinstance(im, float):
            re, im = float(re), float(im)
            if not (math.isfinite(re) and math.isfinite(im)):
                raise ValueError("Complex scalar must be finite")
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    @classmethod
    def of(cls, value: Number) -> "Cplx":
        """Convert a Python number into a `Cplx`."""
        if isinstance(value, Cplx):
            return value
        if isinstance(value, complex):
            return cls(value.real, value.imag)
        return cls(value)

    @property
    def is_exact(self) -> bool:
        """Whether both parts are exact fractions."""
        return isinstance(self.re, Fraction)

    def to_float(self) -> "Cplx":
        """Same value in the float backend.

        Raises:
            InvalidParameter: A part lies outside the float range.
        """
        try:
            return Cplx(float(self.re), float(self.im))
        except OverflowError as err:
            raise InvalidParameter("Value exceeds the float range") from err

    def conj(self) -> "Cplx":
        """Complex conjugate."""
        return Cplx(self.re, -self.im)

    def abs2(self) -> Real:
        """Squared modulus, exact in the rational backend."""
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __add__(self, other: Number) -> "Cplx":
        other = Cplx.of(other)
        return Cplx(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other: Number) -> "Cplx":
        other = Cplx.of(other)
        return Cplx(self.re - other.re, self.im - other.im)

    def __rsub__(self, other: Number) -> "Cplx":
        return Cplx.of(other) - self

    def __mul__(self, other: Number) -> "Cplx":
        other = Cplx.of(other)
        return Cplx(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "Cplx":
        other = Cplx.of(other)
        denominator = other.abs2()
        if denominator == 0:
            raise ZeroDivisionError("Complex division by zero")
        numerator = self * other.conj()
        return Cplx(numerator.re / denominator, numerator.im / denominator)

    def __rtruediv__(self, other: Number) -> "Cplx":
        return Cplx.of(other) / self

    def __neg__(self) -> "Cplx":
        return Cplx(-self.re, -self.im)

    def __pow__(self, exponent: int) -> "Cplx":
        if exponent < 0:
            return 1 / (self ** (-exponent))
        result, base = Cplx(1), self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def sqrt(self) -> "Cplx":
        """Principal square root.

        Stays exact when the root is a Gaussian rational, otherwise falls back to
        the float backend.
        """
        if self.is_exact:
            modulus = _fraction_sqrt(self.abs2())
            if modulus is not None:
                real = _fraction_sqrt((modulus + self.re) / 2)
                imag = _fraction_sqrt((modulus - self.re) / 2)
                if real is not None and imag is not None:
                    return Cplx(real, -imag if self.im < 0 else imag)
            log.debug("No rational square root of %s, using float", self)
        return Cplx.of(cmath.sqrt(complex(self)))

    def __str__(self) -> str:
        if self.im == 0:
            return _format_real(self.re)
        imag = _format_real(abs(self.im)) + "i"
        if self.re == 0:
            return imag if self.im > 0 else "-" + imag
        sign = "+" if self.im > 0 else "-"
        return f"{_format_real(self.re)}{sign}{imag}"

    def to_json(self) -> List[Union[str, float]]:
        """`[re, im]` as rational strings (exact) or numbers (float)."""
        if self.is_exact:
            return [str(self.re), str(self.im)]
        return [float(self.re), float(self.im)]


ZERO = Cplx(0)
ONE = Cplx(1)
I = Cplx(0, 1)


def _fraction_sqrt(value: Fraction) -> Optional[Fraction]:
    if value < 0:
        return None
    numerator = math.isqrt(value.numerator)
    denominator = math.isqrt(value.denominator)
    if numerator**2 == value.numerator and denominator**2 == value.denominator:
        return Fraction(numerator, denominator)
    return None


def _format_real(value: Real) -> str:
    if isinstance(value, Fraction):
        return str(value)
    return repr(float(value))


def compare(lhs: Real, rhs: Real, what: str = "") -> int:
    """Three-way comparison of real scalars.

    Exact operands compare exactly. Otherwise values within the configured
    tolerance count as equal; a nonzero difference swallowed this way is
    recorded as a marginal decision.

    Args:
        lhs: Left operand.
        rhs: Right operand.
        what: Label recorded with a marginal decision.

    Returns:
        -1, 0 or 1.
    """
    if not isinstance(lhs, float) and not isinstance(rhs, float):
        return (lhs > rhs) - (lhs < rhs)
    diff = float(lhs) - float(rhs)
    if abs(diff) <= Config.conf["eps"]:
        if diff != 0:
            log.debug("Marginal decision on %s (difference %g)", what or "value", diff)
            if (hits := _marginal_hits.get()) is not None:
                hits.append(what or "value")
        return 0
    return 1 if diff > 0 else -1


def is_zero(value: Cplx, what: str = "") -> bool:
    """Whether `value` vanishes, within tolerance for floats."""
    if value.is_exact:
        return value.re == 0 and value.im == 0
    return compare(abs(value), 0.0, what) == 0


def modulus_compare(value: Cplx, radius_sq: Real = Fraction(1), what: str = "") -> int:
    """Compare |value|² against `radius_sq`."""
    return compare(value.abs2(), radius_sq, what)


@contextmanager
def track_marginal() -> Iterator[List[str]]:
    """Collect the labels of marginal decisions taken inside the block.

    Nested blocks pass their hits on to the enclosing one.
    """
    outer = _marginal_hits.get()
    hits: List[str] = []
    token = _marginal_hits.set(hits)
    try:
        yield hits
    finally:
        _marginal_hits.reset(token)
        if outer is not None:
            outer.extend(hits)
