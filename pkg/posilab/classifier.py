"""Posinormality, coposinormality and hyponormality of C_φ.

Every verdict is decided twice: by the general selfmap criteria on φ∘σ⁻¹ and
σ∘φ⁻¹, and by a case analysis over the fixed-point type of φ. The routes must
agree; on exact input a disagreement is an error, on float input it is
reported as marginal.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Tuple

from posilab.adjoint import phi_sigma_inv, sigma_phi_inv
from posilab.exceptions import (
    InternalCrossCheckMismatch,
    NoBoundaryFixedPoint,
    NotASelfmap,
    NotDilationType,
)
from posilab.halfplane import parabolic_parameter
from posilab.mobius import (
    Infinity,
    MapClass,
    MapKind,
    MobiusMap,
    classify,
    compose,
    disk_automorphism,
    is_selfmap_of_disk,
    point_to_json,
    power_of,
    zero_in_disk,
)
from posilab.scalars import Cplx, compare, is_zero, modulus_compare, track_marginal

log = logging.getLogger(__name__)


class Branch(Enum):
    """Case of the fixed-point analysis a verdict was taken in."""

    CONSTANT = "constant"
    AUTOMORPHISM = "automorphism"
    DILATION_INTERIOR_EXTERIOR = "dilation-interior-exterior"
    DILATION_INTERIOR_BOUNDARY = "dilation-interior-boundary"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


def branch_of(kind: MapKind) -> Branch:
    """Case branch for a map kind."""
    if kind is MapKind.CONSTANT:
        return Branch.CONSTANT
    if kind.is_automorphism:
        return Branch.AUTOMORPHISM
    if kind is MapKind.DILATION_INTERIOR_EXTERIOR:
        return Branch.DILATION_INTERIOR_EXTERIOR
    if kind is MapKind.DILATION_INTERIOR_BOUNDARY:
        return Branch.DILATION_INTERIOR_BOUNDARY
    if kind.is_parabolic:
        return Branch.PARABOLIC
    return Branch.HYPERBOLIC


@dataclass(frozen=True)
class Verdict:
    """Outcome of one property decided by both routes."""

    value: bool
    route_criterion: bool
    route_case: bool
    branch: Branch
    witness: Optional[dict] = None
    marginal: bool = False

    def to_json(self) -> dict:
        """JSON friendly representation."""
        return {
            "value": self.value,
            "route_criterion": self.route_criterion,
            "route_case": self.route_case,
            "branch": self.branch.value,
            "witness": self.witness,
            "marginal": self.marginal,
        }


@dataclass(frozen=True)
class CanonicalDilationForm:
    """φ conjugated by τ_w(z) = (w−z)/(1−w̄z) is ψ(z) = αz/(1−cz)."""

    w: Cplx
    alpha: Cplx
    c: Cplx

    @property
    def is_tau_alpha_tau(self) -> bool:
        """Whether φ = τ_w∘(ατ_w), i.e. c = 0."""
        return is_zero(self.c, "dilation obstruction c")

    def to_json(self) -> dict:
        """JSON friendly representation."""
        return {"w": self.w.to_json(), "alpha": self.alpha.to_json(), "c": self.c.to_json()}


@dataclass(frozen=True)
class ClassificationReport:
    """Map class, the three verdicts and explanatory notes."""

    map: MobiusMap
    map_class: MapClass
    posinormal: Verdict
    coposinormal: Verdict
    hyponormal: Verdict
    subnormal_equivalent: bool
    power_breakdown_at_n: Optional[int] = None
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        """JSON friendly representation."""
        return {
            "map": self.map.to_json(),
            "map_class": self.map_class.to_json(),
            "posinormal": self.posinormal.to_json(),
            "coposinormal": self.coposinormal.to_json(),
            "hyponormal": self.hyponormal.to_json(),
            "subnormal_equivalent": self.subnormal_equivalent,
            "power_breakdown_at_n": self.power_breakdown_at_n,
            "notes": list(self.notes),
        }


def _selfmap_class(phi: MobiusMap) -> MapClass:
    if not is_selfmap_of_disk(phi):
        raise NotASelfmap(f"{phi} is not a selfmap of the unit disk")
    return classify(phi)


def canonical_dilation_form(phi: MobiusMap) -> CanonicalDilationForm:
    """Conjugate the interior fixed point w to 0 and read ψ(z) = αz/(1−cz).

    Raises:
        NotDilationType: `phi` fixes no point of the open disk.
    """
    map_class = _selfmap_class(phi)
    if not (map_class.kind.is_dilation or map_class.kind is MapKind.ELLIPTIC_AUTOMORPHISM):
        raise NotDilationType(f"{phi} of kind {map_class.kind.value} has no interior fixed point")
    w = map_class.denjoy_wolff
    assert isinstance(w, Cplx)  # nosec B101
    tau = disk_automorphism(w)
    psi = compose(tau, compose(phi, tau))
    if not is_zero(psi.b, "conjugate at 0"):
        log.warning("Conjugate %s of %s does not fix 0", psi, phi)
    return CanonicalDilationForm(w, psi.a, -psi.c)


def _decide(
    phi: MobiusMap,
    name: str,
    criterion: Callable[[], bool],
    case: Callable[[], Tuple[bool, Branch, Optional[dict]]],
    marginal: bool,
) -> Verdict:
    with track_marginal() as hits:
        route_criterion = criterion()
        route_case, branch, witness = case()
    marginal = marginal or bool(hits)
    if route_criterion != route_case:
        if phi.is_exact and not marginal:
            log.error(
                "%s of %s: criterion says %s, case %s says %s",
                name, phi, route_criterion, branch.value, route_case,
            )
            raise InternalCrossCheckMismatch(
                f"{name} routes disagree for {phi} in branch {branch.value}"
            )
        log.warning("%s of %s is marginal: routes disagree", name, phi)
        marginal = True
    return Verdict(route_case, route_criterion, route_case, branch, witness, marginal)


def _zero_witness(phi: MobiusMap) -> Optional[dict]:
    zero = zero_in_disk(phi)
    return None if zero is None else {"zero": zero.to_json()}


def is_posinormal(phi: MobiusMap) -> Verdict:
    """Decide posinormality of C_φ.

    Criterion: φ vanishes in the disk and φ∘σ⁻¹ is a selfmap. Cases: always for
    automorphisms, for τ∘ατ forms when |w| < |α|, for parabolic maps and
    dilations with a boundary fixed point when φ vanishes in the disk, never for
    hyperbolic non-automorphisms. A constant φ qualifies exactly when φ ≡ 0.

    Raises:
        NotASelfmap: `phi` does not map the disk into itself.
        InternalCrossCheckMismatch: The routes disagree on exact input.
    """
    map_class = _selfmap_class(phi)
    branch = branch_of(map_class.kind)

    def criterion() -> bool:
        if phi.is_constant:
            return is_zero(phi.constant_value)
        return zero_in_disk(phi) is not None and is_selfmap_of_disk(phi_sigma_inv(phi))

    def case() -> Tuple[bool, Branch, Optional[dict]]:
        if branch is Branch.CONSTANT:
            return is_zero(phi.constant_value), branch, None
        if branch is Branch.AUTOMORPHISM:
            return True, branch, _zero_witness(phi)
        if branch is Branch.DILATION_INTERIOR_EXTERIOR:
            form = canonical_dilation_form(phi)
            value = form.is_tau_alpha_tau and (
                compare(form.w.abs2(), form.alpha.abs2(), "|w| vs |alpha|") < 0
            )
            return value, branch, form.to_json()
        if branch is Branch.HYPERBOLIC:
            return False, branch, None
        witness = _zero_witness(phi)
        return witness is not None, branch, witness

    return _decide(phi, "posinormality", criterion, case, bool(map_class.marginal))


def is_coposinormal(phi: MobiusMap) -> Verdict:
    """Decide coposinormality of C_φ.

    Criterion: σ∘φ⁻¹ is a selfmap. Cases: always for automorphisms and when the
    Denjoy-Wolff point is on the circle, for dilations without boundary fixed
    point exactly in the τ∘ατ form, never for dilations with a boundary fixed
    point. A constant φ qualifies exactly when φ ≡ 0.

    Raises:
        NotASelfmap: `phi` does not map the disk into itself.
        InternalCrossCheckMismatch: The routes disagree on exact input.
    """
    map_class = _selfmap_class(phi)
    branch = branch_of(map_class.kind)

    def criterion() -> bool:
        if phi.is_constant:
            return is_zero(phi.constant_value)
        return is_selfmap_of_disk(sigma_phi_inv(phi))

    def case() -> Tuple[bool, Branch, Optional[dict]]:
        if branch is Branch.CONSTANT:
            return is_zero(phi.constant_value), branch, None
        if branch in (Branch.AUTOMORPHISM, Branch.PARABOLIC, Branch.HYPERBOLIC):
            witness = None
            if branch is not Branch.AUTOMORPHISM:
                witness = {"denjoy_wolff": point_to_json(map_class.denjoy_wolff)}
            return True, branch, witness
        if branch is Branch.DILATION_INTERIOR_EXTERIOR:
            form = canonical_dilation_form(phi)
            return form.is_tau_alpha_tau, branch, form.to_json()
        return False, branch, None

    return _decide(phi, "coposinormality", criterion, case, bool(map_class.marginal))


def hyponormal_form(phi: MobiusMap) -> Optional[dict]:
    """Recognize φ(z) = αz with |α| ≤ 1 or φ(z) = sz/(1−(1−s)η̄z), 0 < s < 1, |η| = 1.

    Returns:
        The form with its parameters, or None.
    """
    if phi.is_constant:
        value = phi.constant_value
        return {"form": "alpha-z", "alpha": value.to_json()} if is_zero(value) else None
    if not is_zero(phi.b, "phi(0)"):
        return None
    if is_zero(phi.c, "c"):
        if modulus_compare(phi.a, what="|alpha|") <= 0:
            return {"form": "alpha-z", "alpha": phi.a.to_json()}
        return None
    s = phi.a
    if not is_zero(Cplx(s.im), "Im(s)"):
        return None
    if compare(s.re, 0, "s") <= 0 or compare(s.re, 1, "s") >= 0:
        return None
    eta = (-phi.c / (1 - s)).conj()
    if modulus_compare(eta, what="|eta|") != 0:
        return None
    return {"form": "s-eta", "s": Cplx(s.re).to_json(), "eta": eta.to_json()}


def is_hyponormal(phi: MobiusMap, posinormal: Optional[Verdict] = None) -> Verdict:
    """Decide hyponormality of C_φ, equivalently subnormality.

    Criterion: posinormal by the criterion route and φ(0) = 0. Case: φ has one of
    the two canonical forms of `hyponormal_form`.

    Raises:
        NotASelfmap: `phi` does not map the disk into itself.
        InternalCrossCheckMismatch: The routes disagree on exact input.
    """
    if posinormal is None:
        posinormal = is_posinormal(phi)
    map_class = _selfmap_class(phi)

    def vanishes_at_origin() -> bool:
        if phi.is_constant:
            return is_zero(phi.constant_value)
        return is_zero(phi.b, "phi(0)")

    def criterion() -> bool:
        return posinormal.route_criterion and vanishes_at_origin()

    def case() -> Tuple[bool, Branch, Optional[dict]]:
        form = hyponormal_form(phi)
        return form is not None, branch_of(map_class.kind), form

    verdict = _decide(phi, "hyponormality", criterion, case, posinormal.marginal)
    if verdict.value and not posinormal.value:
        raise InternalCrossCheckMismatch(f"{phi} hyponormal but not posinormal")
    return verdict


def power_map(phi: MobiusMap, n: int) -> MobiusMap:
    """n-fold composition of `phi`."""
    return power_of(phi, n)


def power_breakdown(phi: MobiusMap) -> Optional[int]:
    """Least n with φⁿ not posinormal for parabolic non-automorphisms vanishing in D.

    With φ the rotation of φ_t, φⁿ is the rotation of φ_{nt}, which stops
    vanishing in the disk once Re(nt) ≥ 1.
    """
    try:
        form = parabolic_parameter(phi)
    except NoBoundaryFixedPoint:
        return None
    real_part = form.r.re
    if compare(real_part, 0, "Re(t)") <= 0 or compare(real_part, 1, "Re(t)") >= 0:
        return None
    return math.ceil(1 / real_part)


def _cosubnormal_hint(map_class: MapClass) -> bool:
    # second fixed point −tw with t in [1, ∞]
    second, dw = map_class.second_fixed_point, map_class.denjoy_wolff
    if isinstance(second, Infinity):
        return True
    if second is None or not isinstance(dw, Cplx):
        return False
    ratio = second / dw
    return is_zero(Cplx(ratio.im), "fixed point ratio") and compare(ratio.re, -1, "t") <= 0


def classify_report(phi: MobiusMap) -> ClassificationReport:
    """Classify `phi` and decide all three properties.

    Raises:
        NotASelfmap: `phi` does not map the disk into itself.
        InternalCrossCheckMismatch: The routes disagree on exact input.
    """
    map_class = _selfmap_class(phi)
    posinormal = is_posinormal(phi)
    coposinormal = is_coposinormal(phi)
    hyponormal = is_hyponormal(phi, posinormal)
    notes: List[str] = []
    breakdown = None

    if map_class.kind is MapKind.CONSTANT and posinormal.value:
        notes.append("self-adjoint: C_phi f = f(0)")
    if map_class.kind.is_automorphism:
        notes.append("invertible: automorphism symbol")
    if not phi.is_constant and is_zero(phi.b) and is_zero(phi.c):
        notes.append("normal: phi(z) = alpha z")
    if posinormal.value and coposinormal.value:
        notes.append("ranges of C_phi and its adjoint coincide")
    if map_class.kind is MapKind.PARABOLIC_NON_AUTOMORPHISM and posinormal.value:
        breakdown = power_breakdown(phi)
        if breakdown is not None:
            notes.append(
                f"posinormal and coposinormal, but power {breakdown} is not posinormal"
            )
    if map_class.kind.is_hyperbolic and _cosubnormal_hint(map_class):
        notes.append("cosubnormal: second fixed point is -t w with t >= 1")
    if map_class.marginal:
        notes.append("marginal float decisions: " + ", ".join(sorted(set(map_class.marginal))))

    log.info(
        "%s: posinormal=%s coposinormal=%s hyponormal=%s",
        phi, posinormal.value, coposinormal.value, hyponormal.value,
    )
    return ClassificationReport(
        map=phi,
        map_class=map_class,
        posinormal=posinormal,
        coposinormal=coposinormal,
        hyponormal=hyponormal,
        subnormal_equivalent=hyponormal.value,
        power_breakdown_at_n=breakdown,
        notes=notes,
    )
