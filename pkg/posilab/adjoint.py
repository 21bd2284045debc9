"""Adjoint data of composition operators with linear-fractional symbols.

For φ(z) = (az+b)/(cz+d) the adjoint factors as C_φ* = T_g C_σ T_h* with

    σ(z) = (āz − c̄)/(−b̄z + d̄),   g(z) = 1/(−b̄z + d̄),   h(z) = cz + d.

g and h depend on the coefficient representative of φ, so they are always
computed from the canonical normalization; their operator product does not.
"""

import logging
from dataclasses import dataclass

from posilab.exceptions import NotAnAutomorphism, NotASelfmap
from posilab.mobius import (
    MobiusMap,
    compose,
    evaluate,
    inverse,
    is_disk_automorphism,
    is_selfmap_of_disk,
    make_map,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdjointTriple:
    """The maps (σ, g, h) of the adjoint factorization."""

    sigma: MobiusMap
    g: MobiusMap
    h: MobiusMap

    def to_json(self) -> dict:
        """JSON friendly representation."""
        return {
            "sigma": self.sigma.to_json(),
            "g": self.g.to_json(),
            "h": self.h.to_json(),
        }


def _representative(phi: MobiusMap) -> MobiusMap:
    # constant maps are read as (0z + v)/(0z + 1)
    if phi.is_constant:
        return make_map(0, phi.constant_value, 0, 1)
    return phi


def adjoint_triple(phi: MobiusMap) -> AdjointTriple:
    """Compute (σ, g, h) for a disk selfmap.

    Raises:
        NotASelfmap: `phi` does not map the disk into itself.
    """
    if not is_selfmap_of_disk(phi):
        raise NotASelfmap(f"{phi} is not a selfmap of the unit disk")
    a, b, c, d = (coefficient.conj() for coefficient in _representative(phi).coefficients)
    triple = AdjointTriple(
        sigma=make_map(a, -c, -b, d),
        g=make_map(0, 1, -b, d),
        h=make_map(c.conj(), d.conj(), 0, 1),
    )
    log.debug("Adjoint of %s has sigma %s", phi, triple.sigma)
    return triple


def phi_sigma_inv(phi: MobiusMap) -> MobiusMap:
    """φ∘σ⁻¹, the map deciding posinormality."""
    return compose(phi, inverse(adjoint_triple(phi).sigma))


def sigma_phi_inv(phi: MobiusMap) -> MobiusMap:
    """σ∘φ⁻¹, the map deciding coposinormality."""
    return compose(adjoint_triple(phi).sigma, inverse(phi))


def conjugated_adjoint(phi: MobiusMap, tau: MobiusMap) -> MobiusMap:
    """Adjoint map of τ∘φ∘τ⁻¹, which equals τ∘σ∘τ⁻¹ projectively.

    Raises:
        NotAnAutomorphism: `tau` is not a disk automorphism.
    """
    if not is_disk_automorphism(tau):
        raise NotAnAutomorphism(f"{tau} is not an automorphism of the unit disk")
    conjugate = compose(tau, compose(phi, inverse(tau)))
    return adjoint_triple(conjugate).sigma


def sigma_via_inverse(phi: MobiusMap, z: complex) -> complex:
    """Evaluate σ(z) as 1/conj(φ⁻¹(1/z̄)) in floats.

    Independent of the coefficient formula for σ; `z` must be nonzero and not
    hit a pole along the way.
    """
    preimage = evaluate(inverse(phi), 1 / z.conjugate())
    return 1 / preimage.conjugate()


def reciprocal_g_after_sigma_inv(phi: MobiusMap) -> MobiusMap:
    """1/(g∘σ⁻¹) = (ād̄ − b̄c̄)/(b̄z + ā), a factor of the posinormal witness."""
    representative = _representative(phi)
    a, b, _, _ = representative.coefficients
    return make_map(0, representative.determinant.conj(), b.conj(), a.conj())


def reciprocal_h(phi: MobiusMap) -> MobiusMap:
    """1/h = 1/(cz + d)."""
    _, _, c, d = _representative(phi).coefficients
    return make_map(0, 1, c, d)


def g_after_phi_inv(phi: MobiusMap) -> MobiusMap:
    """g∘φ⁻¹, a factor of the coposinormal witness."""
    return compose(adjoint_triple(phi).g, inverse(phi))
