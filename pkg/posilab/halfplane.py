"""Conjugation to the right halfplane and the parabolic family.

The Cayley map ν(z) = (1+z)/(1−z) carries the disk onto the right halfplane
and 1 to ∞. A selfmap fixing 1 becomes an affine map Φ(z) = sz + r there.
"""

import logging
from dataclasses import dataclass

from posilab.exceptions import InvalidParameter, NoBoundaryFixedPoint, NotASelfmap
from posilab.mobius import (
    ExtPoint,
    MapKind,
    MobiusMap,
    apply,
    classify,
    compose,
    inverse,
    make_map,
    maps_projectively_equal,
    rotation_conjugate,
)
from posilab.scalars import Cplx, Number, Real, compare, is_zero

log = logging.getLogger(__name__)

CAYLEY = make_map(1, 1, -1, 1)
CAYLEY_INVERSE = inverse(CAYLEY)


@dataclass(frozen=True)
class HalfplaneForm:
    """Affine model Φ(z) = sz + r of a selfmap with boundary fixed point `rotation`."""

    s: Real
    r: Cplx
    rotation: Cplx

    @property
    def is_automorphism(self) -> bool:
        """Whether the model is a halfplane automorphism, i.e. Re(r) = 0."""
        return compare(self.r.re, 0, "Re(r)") == 0

    def to_json(self) -> dict:
        """JSON friendly representation."""
        return {
            "s": str(self.s) if not isinstance(self.s, float) else self.s,
            "r": self.r.to_json(),
            "rotation": self.rotation.to_json(),
        }


def cayley(z: ExtPoint) -> ExtPoint:
    """ν(z) = (1+z)/(1−z)."""
    return apply(CAYLEY, z)


def cayley_inv(z: ExtPoint) -> ExtPoint:
    """ν⁻¹(z) = (z−1)/(z+1)."""
    return apply(CAYLEY_INVERSE, z)


def boundary_fixed_point(phi: MobiusMap) -> Cplx:
    """Fixed point of `phi` on the unit circle used for the halfplane model.

    The Denjoy-Wolff point for hyperbolic and parabolic maps, the second fixed
    point for dilations with a boundary fixed point.

    Raises:
        NoBoundaryFixedPoint: `phi` fixes no point of the circle.
    """
    try:
        map_class = classify(phi)
    except NotASelfmap as err:
        raise NoBoundaryFixedPoint(f"{phi} is not a selfmap of the disk") from err
    kind = map_class.kind
    if kind.is_hyperbolic or kind.is_parabolic:
        point = map_class.denjoy_wolff
    elif kind is MapKind.DILATION_INTERIOR_BOUNDARY:
        point = map_class.second_fixed_point
    else:
        raise NoBoundaryFixedPoint(f"{phi} of kind {kind.value} fixes no boundary point")
    assert isinstance(point, Cplx)  # nosec B101
    return point


def halfplane_form(phi: MobiusMap) -> HalfplaneForm:
    """Read (s, r) off ν∘ψ∘ν⁻¹ where ψ(z) = w̄φ(wz) fixes 1.

    Raises:
        NoBoundaryFixedPoint: `phi` fixes no point of the circle.
    """
    rotation = boundary_fixed_point(phi)
    rotated = rotation_conjugate(phi, rotation)
    affine = compose(CAYLEY, compose(rotated, CAYLEY_INVERSE))
    if not is_zero(affine.c, "halfplane model c"):
        log.warning("Halfplane model %s of %s does not fix infinity", affine, phi)
    if not is_zero(Cplx(affine.a.im), "Im(s)"):
        log.warning("Halfplane dilation %s of %s is not real", affine.a, phi)
    form = HalfplaneForm(affine.a.re, affine.b, rotation)
    log.debug("Halfplane form of %s: s=%s r=%s", phi, form.s, form.r)
    return form


def from_halfplane(s: Number, r: Number, rotation: Number = 1) -> MobiusMap:
    """Build φ(z) = w ν⁻¹(sν(w̄z) + r).

    Raises:
        InvalidParameter: s ≤ 0 or Re(r) < 0, which are no disk selfmaps.
    """
    s_value, r, rotation = Cplx.of(s), Cplx.of(r), Cplx.of(rotation)
    if not is_zero(Cplx(s_value.im)) or compare(s_value.re, 0, "s") <= 0:
        raise InvalidParameter(f"Halfplane dilation s={s_value} must be real and positive")
    if compare(r.re, 0, "Re(r)") < 0:
        raise InvalidParameter(f"Halfplane translation r={r} needs Re(r) >= 0")
    affine = make_map(s_value, r, 0, 1)
    model = compose(CAYLEY_INVERSE, compose(affine, CAYLEY))
    return rotation_conjugate(model, rotation.conj())


def halfplane_adjoint(form: HalfplaneForm) -> HalfplaneForm:
    """Halfplane model Σ(z) = z/s + r̄/s of the adjoint map σ."""
    return HalfplaneForm(1 / form.s, form.r.conj() / form.s, form.rotation)


def parabolic_map(t: Number) -> MobiusMap:
    """φ_t(z) = ((2−t)z + t)/(−tz + 2 + t), the parabolic map with model z + t.

    Raises:
        InvalidParameter: Re(t) < 0 or t = 0.
    """
    t = Cplx.of(t)
    if is_zero(t, "t"):
        raise InvalidParameter("Parabolic parameter t must be nonzero")
    if compare(t.re, 0, "Re(t)") < 0:
        raise InvalidParameter(f"Parabolic parameter t={t} needs Re(t) >= 0")
    return make_map(2 - t, t, -t, 2 + t)


def parabolic_parameter(phi: MobiusMap) -> HalfplaneForm:
    """Halfplane form of a parabolic map; `r` is its parameter t after rotation.

    Raises:
        NoBoundaryFixedPoint: `phi` is not parabolic.
    """
    form = halfplane_form(phi)
    if compare(form.s, 1, "parabolic s") != 0:
        raise NoBoundaryFixedPoint(f"{phi} is not of parabolic type")
    return form


def semigroup_check(s: Number, t: Number) -> bool:
    """Whether φ_s∘φ_t = φ_{s+t}.

    Raises:
        InvalidParameter: s or t is not admissible.
    """
    s, t = Cplx.of(s), Cplx.of(t)
    return maps_projectively_equal(
        compose(parabolic_map(s), parabolic_map(t)), parabolic_map(s + t)
    )
