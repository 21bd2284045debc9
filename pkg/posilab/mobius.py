"""Linear-fractional maps of the extended plane.

Exact and float algebra of z ↦ (az+b)/(cz+d), disk selfmap and automorphism
tests that avoid square roots, fixed points and the fixed-point taxonomy of
disk selfmaps.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple, Union

from posilab.exceptions import (
    AllZeroCoefficients,
    ConstantMap,
    ConstantMapNotInvertible,
    EvaluationAtPole,
    IdentityMapAllFixed,
    InternalCrossCheckMismatch,
    NotASelfmap,
    ZeroDenominatorMap,
)
from posilab.scalars import (
    ONE,
    ZERO,
    Cplx,
    Number,
    Real,
    compare,
    is_zero,
    modulus_compare,
    track_marginal,
)
from posilab.util.config import Config

log = logging.getLogger(__name__)


class Infinity:
    """The point at infinity of the extended plane."""

    _instance: Optional["Infinity"] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"

    def __str__(self) -> str:
        return "inf"


INFINITY = Infinity()

ExtPoint = Union[Cplx, Infinity]


@dataclass(frozen=True)
class MobiusMap:
    """Canonically normalized coefficients of z ↦ (az+b)/(cz+d).

    Build instances with `make_map`, which applies the normalization.
    """

    a: Cplx
    b: Cplx
    c: Cplx
    d: Cplx

    @property
    def coefficients(self) -> Tuple[Cplx, Cplx, Cplx, Cplx]:
        """Coefficients as `(a, b, c, d)`."""
        return self.a, self.b, self.c, self.d

    @property
    def determinant(self) -> Cplx:
        """ad − bc."""
        return self.a * self.d - self.b * self.c

    @property
    def is_constant(self) -> bool:
        """Whether the map is degenerate, i.e. ad − bc = 0."""
        return is_zero(self.determinant, "determinant")

    @property
    def is_exact(self) -> bool:
        """Whether the coefficients live in the exact backend."""
        return all(coefficient.is_exact for coefficient in self.coefficients)

    @property
    def constant_value(self) -> Cplx:
        """Value of a constant map."""
        if not self.is_constant:
            raise ValueError("Map is not constant")
        if not is_zero(self.d):
            return self.b / self.d
        return self.a / self.c

    def to_float(self) -> "MobiusMap":
        """Same map in the float backend."""
        return make_map(*(coefficient.to_float() for coefficient in self.coefficients))

    def __call__(self, z: Union[ExtPoint, Number]) -> ExtPoint:
        if not isinstance(z, Infinity):
            z = Cplx.of(z)
        return apply(self, z)

    def __str__(self) -> str:
        return f"(({self.a})z + {self.b})/(({self.c})z + {self.d})"

    def to_json(self) -> Dict[str, list]:
        """Coefficients keyed by name."""
        return {
            name: coefficient.to_json()
            for name, coefficient in zip("abcd", self.coefficients)
        }


@dataclass(frozen=True)
class Circle:
    """Circle given by center and squared radius."""

    center: Cplx
    radius_sq: Real


@dataclass(frozen=True)
class Line:
    """Straight line through `point` along `direction`."""

    point: Cplx
    direction: Cplx


GeneralizedCircle = Union[Circle, Line]


class MapKind(Enum):
    """Fixed-point taxonomy of disk selfmaps."""

    CONSTANT = "Constant"
    IDENTITY = "Identity"
    ELLIPTIC_AUTOMORPHISM = "EllipticAutomorphism"
    DILATION_INTERIOR_EXTERIOR = "DilationInteriorExterior"
    DILATION_INTERIOR_BOUNDARY = "DilationInteriorBoundary"
    HYPERBOLIC_AUTOMORPHISM = "HyperbolicAutomorphism"
    HYPERBOLIC_NON_AUTOMORPHISM = "HyperbolicNonAutomorphism"
    PARABOLIC_AUTOMORPHISM = "ParabolicAutomorphism"
    PARABOLIC_NON_AUTOMORPHISM = "ParabolicNonAutomorphism"

    @property
    def is_automorphism(self) -> bool:
        """Whether maps of this kind are disk automorphisms."""
        return self in (
            MapKind.IDENTITY,
            MapKind.ELLIPTIC_AUTOMORPHISM,
            MapKind.HYPERBOLIC_AUTOMORPHISM,
            MapKind.PARABOLIC_AUTOMORPHISM,
        )

    @property
    def is_dilation(self) -> bool:
        """Whether maps of this kind fix a point of the open disk."""
        return self in (
            MapKind.DILATION_INTERIOR_EXTERIOR,
            MapKind.DILATION_INTERIOR_BOUNDARY,
        )

    @property
    def is_hyperbolic(self) -> bool:
        """Whether the Denjoy-Wolff point is on the circle with derivative below 1."""
        return self in (
            MapKind.HYPERBOLIC_AUTOMORPHISM,
            MapKind.HYPERBOLIC_NON_AUTOMORPHISM,
        )

    @property
    def is_parabolic(self) -> bool:
        """Whether the Denjoy-Wolff point is on the circle with derivative 1."""
        return self in (
            MapKind.PARABOLIC_AUTOMORPHISM,
            MapKind.PARABOLIC_NON_AUTOMORPHISM,
        )


@dataclass(frozen=True)
class MapClass:
    """Classification of a disk selfmap.

    For elliptic automorphisms and the identity `denjoy_wolff` holds an interior
    fixed point and `elliptic` is set; it is not attracting.
    """

    kind: MapKind
    denjoy_wolff: Optional[ExtPoint] = None
    second_fixed_point: Optional[ExtPoint] = None
    derivative_at_dw: Optional[Cplx] = None
    elliptic: bool = False
    marginal: List[str] = field(default_factory=list, compare=False)

    def to_json(self) -> dict:
        """JSON friendly representation."""
        return {
            "kind": self.kind.value,
            "denjoy_wolff": point_to_json(self.denjoy_wolff),
            "second_fixed_point": point_to_json(self.second_fixed_point),
            "derivative_at_dw": (
                None if self.derivative_at_dw is None else self.derivative_at_dw.to_json()
            ),
            "elliptic": self.elliptic,
            "marginal": bool(self.marginal),
        }


def point_to_json(point: Optional[ExtPoint]):
    """Serialize an optional extended point, infinity as the string "inf"."""
    if point is None:
        return None
    if isinstance(point, Infinity):
        return "inf"
    return point.to_json()


def _is_negligible(value: Cplx, scale: float) -> bool:
    if value.is_exact:
        return value.re == 0 and value.im == 0
    return abs(value) <= Config.conf["eps"] * scale


def make_map(a: Number, b: Number, c: Number, d: Number) -> MobiusMap:
    """Build a normalized map from raw coefficients.

    The coefficients are scaled so that d = 1, else c = 1, else a = 1, else b = 1.
    If any coefficient is a float, all of them are moved to the float backend.

    Raises:
        AllZeroCoefficients: All coefficients vanish.
        ZeroDenominatorMap: c and d both vanish.
        InvalidParameter: An exact coefficient is too large for the float backend.

    Returns:
        The normalized map.
    """
    coefficients = [Cplx.of(value) for value in (a, b, c, d)]
    exact = all(coefficient.is_exact for coefficient in coefficients)
    if not exact:
        coefficients = [coefficient.to_float() for coefficient in coefficients]
    scale = 0.0 if exact else max(abs(coefficient) for coefficient in coefficients)
    negligible = [_is_negligible(coefficient, scale) for coefficient in coefficients]
    if all(negligible):
        raise AllZeroCoefficients("Coefficients (0, 0, 0, 0) do not define a map")
    if negligible[2] and negligible[3]:
        raise ZeroDenominatorMap("Denominator cz + d vanishes identically")

    pivot = next(
        coefficients[index] for index in (3, 2, 0, 1) if not negligible[index]
    )
    zero = ZERO if pivot.is_exact else ZERO.to_float()
    a, b, c, d = (
        zero if small else coefficient / pivot
        for coefficient, small in zip(coefficients, negligible)
    )
    return MobiusMap(a, b, c, d)


IDENTITY = make_map(1, 0, 0, 1)


def apply(f: MobiusMap, z: ExtPoint) -> ExtPoint:
    """Evaluate `f` on the extended plane; poles go to infinity."""
    if f.is_constant:
        return f.constant_value
    if isinstance(z, Infinity):
        if is_zero(f.c):
            return INFINITY
        return f.a / f.c
    denominator = f.c * z + f.d
    if is_zero(denominator):
        return INFINITY
    return (f.a * z + f.b) / denominator


def evaluate(f: MobiusMap, z: complex) -> complex:
    """Float evaluation at a finite point.

    Raises:
        EvaluationAtPole: `z` is the pole of `f`.
    """
    a, b, c, d = (complex(coefficient) for coefficient in f.coefficients)
    denominator = c * z + d
    if denominator == 0:
        raise EvaluationAtPole(f"{z} is the pole of {f}")
    return (a * z + b) / denominator


def compose(f: MobiusMap, g: MobiusMap) -> MobiusMap:
    """Return f∘g via the coefficient matrix product.

    Raises:
        ZeroDenominatorMap: The product matrix degenerates.
    """
    try:
        return make_map(
            f.a * g.a + f.b * g.c,
            f.a * g.b + f.b * g.d,
            f.c * g.a + f.d * g.c,
            f.c * g.b + f.d * g.d,
        )
    except AllZeroCoefficients as err:
        raise ZeroDenominatorMap(f"Composition of {f} and {g} degenerates") from err


def power_of(f: MobiusMap, n: int) -> MobiusMap:
    """n-fold composition by squaring the coefficient matrix."""
    if n < 1:
        raise ValueError("Power must be a positive integer")
    result: Optional[MobiusMap] = None
    base = f
    while n:
        if n & 1:
            result = base if result is None else compose(result, base)
        n >>= 1
        if n:
            base = compose(base, base)
    assert result is not None  # nosec B101
    return result


def inverse(f: MobiusMap) -> MobiusMap:
    """Inverse via the adjugate matrix.

    Raises:
        ConstantMapNotInvertible: `f` is constant.
    """
    if f.is_constant:
        raise ConstantMapNotInvertible(f"{f} is constant")
    return make_map(f.d, -f.b, -f.c, f.a)


def derivative_at(f: MobiusMap, z: Cplx) -> Cplx:
    """φ'(z) = (ad − bc)/(cz + d)².

    Raises:
        EvaluationAtPole: `z` is the pole of `f`.
    """
    if f.is_constant:
        return ZERO
    denominator = f.c * z + f.d
    if is_zero(denominator):
        raise EvaluationAtPole(f"{z} is the pole of {f}")
    return f.determinant / (denominator * denominator)


def maps_projectively_equal(f: MobiusMap, g: MobiusMap) -> bool:
    """Whether the coefficient vectors are scalar multiples of each other."""
    first, second = f.coefficients, g.coefficients
    return all(
        is_zero(first[i] * second[j] - first[j] * second[i], "projective minor")
        for i in range(4)
        for j in range(i + 1, 4)
    )


def is_identity(f: MobiusMap) -> bool:
    """Whether `f` is projectively the identity."""
    return maps_projectively_equal(f, IDENTITY)


def fixed_points(f: MobiusMap) -> List[ExtPoint]:
    """Fixed points of `f`; a double fixed point is listed once.

    Raises:
        ConstantMap: `f` is constant; its only fixed point is its value.
        IdentityMapAllFixed: `f` is the identity.
    """
    if f.is_constant:
        raise ConstantMap(f"{f} is constant with value {f.constant_value}")
    if is_identity(f):
        raise IdentityMapAllFixed("Every point is fixed by the identity")

    linear = f.d - f.a
    if is_zero(f.c, "c"):
        if is_zero(linear, "d - a"):
            return [INFINITY]
        return [f.b / linear, INFINITY]

    discriminant = linear * linear + 4 * f.b * f.c
    if is_zero(discriminant, "discriminant"):
        return [(f.a - f.d) / (2 * f.c)]
    root = discriminant.sqrt()
    return [(f.a - f.d + root) / (2 * f.c), (f.a - f.d - root) / (2 * f.c)]


def image_of_unit_circle(f: MobiusMap) -> GeneralizedCircle:
    """Image of the unit circle under `f`.

    Raises:
        ConstantMap: `f` is constant.
    """
    if f.is_constant:
        raise ConstantMap(f"{f} is constant")
    spread = f.d.abs2() - f.c.abs2()
    if compare(spread, 0, "|d|² - |c|²") == 0:
        images = []
        for boundary_point in (ONE, -ONE, Cplx(0, 1)):
            image = apply(f, boundary_point)
            if not isinstance(image, Infinity):
                images.append(image)
        point, other = images[0], images[1]
        direction = other - point
        if not direction.is_exact:
            direction = direction / abs(direction)
        return Line(point, direction)
    center = (f.b * f.d.conj() - f.a * f.c.conj()) / spread
    radius_sq = center.abs2() - (f.b.abs2() - f.a.abs2()) / spread
    return Circle(center, radius_sq)


def is_selfmap_of_disk(f: MobiusMap) -> bool:
    """Whether `f` maps the open unit disk into itself.

    Constant maps qualify when their value is in the open disk. Otherwise the
    pole must lie outside the closed disk and the image circle inside the closed
    disk, decided without square roots.
    """
    if f.is_constant:
        return modulus_compare(f.constant_value, what="constant value") < 0
    if compare(f.d.abs2() - f.c.abs2(), 0, "|d|² - |c|²") <= 0:
        return False
    image = image_of_unit_circle(f)
    if isinstance(image, Line):
        return False
    center_sq = image.center.abs2()
    radius_sq = image.radius_sq
    if compare(center_sq + radius_sq, 1, "image circle") > 0:
        return False
    slack = 1 - center_sq - radius_sq
    if compare(slack * slack, 4 * center_sq * radius_sq, "image circle") < 0:
        return False
    origin_image = apply(f, ZERO)
    return (
        not isinstance(origin_image, Infinity)
        and modulus_compare(origin_image, what="f(0)") <= 0
    )


def is_disk_automorphism(f: MobiusMap) -> bool:
    """Whether `f` is a selfmap whose image circle is the unit circle."""
    if f.is_constant or not is_selfmap_of_disk(f):
        return False
    image = image_of_unit_circle(f)
    return (
        isinstance(image, Circle)
        and is_zero(image.center, "image center")
        and compare(image.radius_sq, 1, "image radius") == 0
    )


def disk_automorphism(w: Number, rotation: Number = 1) -> MobiusMap:
    """λ(w − z)/(1 − w̄z) for |w| < 1 and |λ| = 1."""
    w, rotation = Cplx.of(w), Cplx.of(rotation)
    return make_map(-rotation, rotation * w, -w.conj(), 1)


def rotation_conjugate(f: MobiusMap, w: Number) -> MobiusMap:
    """z ↦ w̄ f(wz) for unimodular `w`."""
    w = Cplx.of(w)
    return make_map(f.a * w * w.conj(), f.b * w.conj(), f.c * w, f.d)


def _outside_closed_disk(point: ExtPoint, what: str) -> bool:
    return isinstance(point, Infinity) or modulus_compare(point, what=what) > 0


def _on_circle(point: ExtPoint, what: str) -> bool:
    return not isinstance(point, Infinity) and modulus_compare(point, what=what) == 0


def _inside_disk(point: ExtPoint, what: str) -> bool:
    return not isinstance(point, Infinity) and modulus_compare(point, what=what) < 0


def classify(f: MobiusMap) -> MapClass:
    """Classify a disk selfmap by its fixed points.

    The Denjoy-Wolff point is the fixed point in the closed disk where |φ'| ≤ 1.

    Raises:
        NotASelfmap: `f` does not map the disk into itself.

    Returns:
        The map class; `marginal` lists float decisions taken within tolerance.
    """
    with track_marginal() as hits:
        if not is_selfmap_of_disk(f):
            raise NotASelfmap(f"{f} is not a selfmap of the unit disk")
        map_class = _classify_selfmap(f)
    if hits:
        log.warning("Marginal float decisions while classifying %s: %s", f, hits)
        map_class = MapClass(
            map_class.kind,
            map_class.denjoy_wolff,
            map_class.second_fixed_point,
            map_class.derivative_at_dw,
            map_class.elliptic,
            list(hits),
        )
    log.debug("Classified %s as %s", f, map_class.kind.value)
    return map_class


def _classify_selfmap(f: MobiusMap) -> MapClass:
    if f.is_constant:
        return MapClass(MapKind.CONSTANT, denjoy_wolff=f.constant_value)
    if is_identity(f):
        return MapClass(MapKind.IDENTITY, elliptic=True)

    automorphism = is_disk_automorphism(f)
    points = fixed_points(f)

    if len(points) == 1:
        point = points[0]
        if not _on_circle(point, "parabolic fixed point"):
            raise InternalCrossCheckMismatch(
                f"Double fixed point {point} of selfmap {f} is not on the circle"
            )
        kind = (
            MapKind.PARABOLIC_AUTOMORPHISM
            if automorphism
            else MapKind.PARABOLIC_NON_AUTOMORPHISM
        )
        return MapClass(kind, point, None, derivative_at(f, point))

    interior = [point for point in points if _inside_disk(point, "fixed point")]
    if interior:
        inner = interior[0]
        outer = next(point for point in points if point is not inner)
        if automorphism:
            return MapClass(
                MapKind.ELLIPTIC_AUTOMORPHISM,
                inner,
                outer,
                derivative_at(f, inner),
                elliptic=True,
            )
        kind = (
            MapKind.DILATION_INTERIOR_BOUNDARY
            if _on_circle(outer, "second fixed point")
            else MapKind.DILATION_INTERIOR_EXTERIOR
        )
        return MapClass(kind, inner, outer, derivative_at(f, inner))

    boundary = [point for point in points if _on_circle(point, "fixed point")]
    if not boundary:
        raise InternalCrossCheckMismatch(
            f"Selfmap {f} has no fixed point in the closed disk"
        )
    derivatives = [derivative_at(f, point) for point in boundary]
    dw_index = min(range(len(boundary)), key=lambda index: abs(derivatives[index]))
    dw_point, dw_derivative = boundary[dw_index], derivatives[dw_index]
    if compare(dw_derivative.abs2(), 1, "derivative at Denjoy-Wolff point") >= 0:
        raise InternalCrossCheckMismatch(
            f"Distinct fixed points of {f} but derivative {dw_derivative} at {dw_point}"
        )
    second = next(point for point in points if point is not dw_point)
    kind = (
        MapKind.HYPERBOLIC_AUTOMORPHISM
        if automorphism
        else MapKind.HYPERBOLIC_NON_AUTOMORPHISM
    )
    return MapClass(kind, dw_point, second, dw_derivative)


def zero_in_disk(f: MobiusMap) -> Optional[Cplx]:
    """Zero −b/a of `f` when it lies in the open disk, else None."""
    if is_zero(f.b, "b"):
        return ZERO
    if is_zero(f.a, "a"):
        return None
    zero = -f.b / f.a
    if modulus_compare(zero, what="zero of map") < 0:
        return zero
    return None


def iterate_orbit(f: MobiusMap, steps: int = 200, start: complex = 0j) -> complex:
    """Float iterate f^steps(start)."""
    point = start
    for _ in range(steps):
        point = evaluate(f, point)
    return point


