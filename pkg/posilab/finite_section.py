"""Finite sections of composition and Toeplitz operators on H².

Independent numerical oracle for the algebraic verdicts. Operators are
represented in the monomial basis {zⁿ} and every identity is compared on the
leading (N/2)×(N/2) block of its N×N section, judged by its trend over a ladder
of N.

Inner sums of a product run over indices the N×N section cuts off: column j of
C_φ carries the coefficients of φʲ, whose mass sits near index j·|φ'(ζ)| for a
boundary contact point ζ, and row i of C_φ reaches out to about i/|φ'(ζ)|.
Products are therefore formed on columns expanded to an internal length chosen
from Cauchy estimates, so the leading block carries no truncation error above
TAIL_TOLERANCE. Multiplication by a linear-fractional symbol is a first order
recursion on coefficients and runs through `scipy.signal.lfilter`.
"""

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from more_itertools import last, windowed
from scipy import linalg, signal

from posilab.adjoint import (
    adjoint_triple,
    g_after_phi_inv,
    phi_sigma_inv,
    reciprocal_g_after_sigma_inv,
    reciprocal_h,
    sigma_phi_inv,
)
from posilab.classifier import is_coposinormal, is_posinormal
from posilab.exceptions import (
    AlphaOutsideDisk,
    InvalidParameter,
    NotASelfmap,
    PoleInClosedDisk,
    WitnessUndefined,
)
from posilab.mobius import MobiusMap, evaluate, image_of_unit_circle, is_selfmap_of_disk
from posilab.util.config import Config
from posilab.util.consts import MAX_INTERNAL_LENGTH, MAX_TRUNCATION

log = logging.getLogger(__name__)

CoeffSeries = np.ndarray
"""Maclaurin coefficients a₀..a_{N−1}, complex128."""

TruncMatrix = np.ndarray
"""Dense N×N complex128 matrix in the monomial basis."""

CONVERGED = 1e-10
"""Residuals at or below this are roundoff; the trace counts as decaying."""

RESIDUAL_FLOOR = 1e-16

TAIL_TOLERANCE = 1e-15
"""ℓ¹ mass a truncated inner sum may drop."""

_CHUNK = 256


class TraceVerdict:
    """Trend of a residual trace."""

    DECAYING = "Decaying"
    STAGNANT = "Stagnant"


@dataclass(frozen=True)
class ResidualTrace:
    """Residuals over increasing truncation orders."""

    name: str
    points: List[Tuple[int, float]]
    verdict: str
    slope: float
    extras: dict = field(default_factory=dict, compare=False)

    @property
    def is_decaying(self) -> bool:
        """Whether the residuals tend to zero."""
        return self.verdict == TraceVerdict.DECAYING

    def residual_at(self, order: int) -> float:
        """Residual recorded for truncation order `order`."""
        return dict(self.points)[order]

    def to_json(self) -> dict:
        """JSON friendly representation."""
        return {
            "name": self.name,
            "points": [[order, residual] for order, residual in self.points],
            "verdict": self.verdict,
            "slope": self.slope,
            **({"extras": self.extras} if self.extras else {}),
        }


@dataclass(frozen=True)
class InterrupterCheck:
    """Residual of AA* = A*PA with P = TT* and the smallest eigenvalue of P."""

    residual: float
    min_eigenvalue: float

    def is_positive(self, tolerance: float = 1e-9) -> bool:
        """Whether P is positive semidefinite up to `tolerance`."""
        return self.min_eigenvalue >= -tolerance


def _check_order(order: int):
    if not 2 <= order <= MAX_TRUNCATION:
        raise InvalidParameter(f"Truncation order {order} outside [2, {MAX_TRUNCATION}]")


def _check_selfmap(phi: MobiusMap):
    if not is_selfmap_of_disk(phi):
        raise NotASelfmap(f"{phi} is not a selfmap of the unit disk")


def _leading_block(order: int) -> int:
    return max(order // 2, 1)


def _complex_coefficients(f: MobiusMap) -> Tuple[complex, complex, complex, complex]:
    a, b, c, d = (complex(coefficient) for coefficient in f.coefficients)
    return a, b, c, d


def _filter_coefficients(f: MobiusMap) -> Tuple[np.ndarray, np.ndarray]:
    """Numerator and denominator of (az+b)/(cz+d) in powers of z for lfilter.

    Raises:
        PoleInClosedDisk: The pole −d/c lies in the closed unit disk.
    """
    a, b, c, d = _complex_coefficients(f)
    if c != 0 and abs(d) <= abs(c):
        raise PoleInClosedDisk(f"Pole of {f} lies in the closed unit disk")
    return np.array([b, a]), np.array([d, c])


def taylor_coeffs(f: MobiusMap, order: int) -> CoeffSeries:
    """Maclaurin coefficients of (az+b)/(cz+d) up to z^(order−1).

    Raises:
        PoleInClosedDisk: The pole −d/c lies in the closed unit disk.
    """
    a, b, c, d = _complex_coefficients(f)
    _filter_coefficients(f)
    ratio = -c / d
    reciprocal = ratio ** np.arange(order) / d
    coefficients = b * reciprocal
    coefficients[1:] += a * reciprocal[:-1]
    return coefficients


def toeplitz_matrix(symbol: MobiusMap, order: int) -> TruncMatrix:
    """Lower-triangular Toeplitz section of multiplication by `symbol`."""
    column = taylor_coeffs(symbol, order)
    return linalg.toeplitz(column, np.zeros(order, dtype=complex))


def _multiply(symbol: MobiusMap, block: np.ndarray) -> np.ndarray:
    """Apply T_symbol to every column of `block`; exact on the kept coefficients."""
    numerator, denominator = _filter_coefficients(symbol)
    return signal.lfilter(numerator, denominator, block, axis=0)


def _power_chunks(phi: MobiusMap, count: int, length: int) -> Iterator[np.ndarray]:
    """Columns φ⁰..φ^(count−1), each cut to `length` coefficients, in slabs."""
    numerator, denominator = _filter_coefficients(phi)
    column = np.zeros(length, dtype=complex)
    column[0] = 1
    for start in range(0, count, _CHUNK):
        chunk = np.empty((length, min(_CHUNK, count - start)), dtype=complex)
        for offset in range(chunk.shape[1]):
            chunk[:, offset] = column
            column = signal.lfilter(numerator, denominator, column)
        yield chunk


def _power_block(phi: MobiusMap, count: int, length: int) -> np.ndarray:
    return np.hstack(list(_power_chunks(phi, count, length)))


def _max_modulus(f: MobiusMap, radii: np.ndarray) -> np.ndarray:
    """max |f| on the circles |z| = r, for radii short of the pole."""
    a, b, c, d = _complex_coefficients(f)
    spread = abs(d) ** 2 - abs(c) ** 2 * radii**2
    center = (b * np.conj(d) - a * np.conj(c) * radii**2) / spread
    radius = abs(a * d - b * c) * radii / spread
    return np.maximum(np.abs(center) + radius, np.finfo(float).tiny)


def _pole_modulus(f: MobiusMap) -> float:
    _filter_coefficients(f)
    _, _, c, d = _complex_coefficients(f)
    return math.inf if c == 0 else abs(d) / abs(c)


def _internal_length(bound: float, floor: int) -> int:
    if not math.isfinite(bound):
        bound = math.inf
    if bound + 1 > MAX_INTERNAL_LENGTH:
        log.warning(
            "Internal section length %s capped at %d, tails may not converge",
            bound,
            MAX_INTERNAL_LENGTH,
        )
        return max(MAX_INTERNAL_LENGTH, floor)
    return max(int(math.ceil(bound)) + 1, floor)


def series_length(power_of: MobiusMap, count: int, *factors: MobiusMap) -> int:
    """Coefficients needed so that F·fʲ, j < `count`, drops at most TAIL_TOLERANCE.

    F is the product of `factors` and f is `power_of`. With M(R) the maximum
    modulus on |z| = R inside every pole, the coefficients of F·fʲ beyond K sum
    to at most M_F(R)·M_f(R)ʲ·R^(−K)·R/(R−1); the bound is minimised over R.
    """
    reach = min(min(_pole_modulus(f) for f in (power_of, *factors)), 1e4)
    radii = np.exp(np.linspace(0.01, 0.99, 99) * math.log(reach))
    base = math.log(1 / TAIL_TOLERANCE) - np.log1p(-1 / radii)
    for factor in factors:
        base = base + np.log(_max_modulus(factor, radii))
    growth = (count - 1) * np.log(_max_modulus(power_of, radii))
    # the bound is affine in j, so both ends of the range cover it
    bound = np.min(np.maximum(base, base + growth) / np.log(radii))
    return _internal_length(float(bound), count)


def row_length(phi: MobiusMap, rows: int) -> int:
    """Columns of C_φ needed so that rows i < `rows` drop at most TAIL_TOLERANCE.

    Entry i of φᵏ is at most M(r)ᵏ/rⁱ for 0 < r < 1, so the row tail beyond K
    sums to M(r)^K·r^(−i)/(1 − M(r)); the bound is minimised over r.
    """
    radii = 1 - np.geomspace(0.98, 1e-5, 120)
    modulus = _max_modulus(phi, radii)
    inside = modulus < 1
    if not inside.any():
        return _internal_length(math.inf, rows)
    radii, modulus = radii[inside], modulus[inside]
    bound = (
        (rows - 1) * np.log(1 / radii) - np.log1p(-modulus) + math.log(1 / TAIL_TOLERANCE)
    ) / -np.log(modulus)
    return _internal_length(float(np.min(bound)), rows)


def composition_matrix(phi: MobiusMap, order: int) -> TruncMatrix:
    """Section of C_φ; column j holds the coefficients of φʲ.

    Raises:
        NotASelfmap: `phi` does not map the disk into itself.
    """
    _check_order(order)
    _check_selfmap(phi)
    return _power_block(phi, order, order)


def _deviation(lhs: np.ndarray, rhs: np.ndarray) -> float:
    return float(np.max(np.abs(lhs - rhs), initial=0.0))


def _leading_deviation(lhs: np.ndarray, rhs: np.ndarray) -> float:
    block = _leading_block(lhs.shape[0])
    return _deviation(lhs[:block, :block], rhs[:block, :block])


def cowen_residual(phi: MobiusMap, order: int) -> float:
    """Leading-block deviation of C_φ* from T_g C_σ T_h*.

    T_g is lower triangular and T_h* has finite columns, so N×N sections give
    the leading block of the product exactly.
    """
    triple = adjoint_triple(phi)
    adjoint = composition_matrix(phi, order).conj().T
    product = (
        toeplitz_matrix(triple.g, order)
        @ composition_matrix(triple.sigma, order)
        @ toeplitz_matrix(triple.h, order).conj().T
    )
    return _leading_deviation(adjoint, product)


def _require_posinormal(phi: MobiusMap):
    if not is_posinormal(phi).value:
        raise WitnessUndefined(f"C_phi is not posinormal for {phi}")


def _require_coposinormal(phi: MobiusMap):
    if not is_coposinormal(phi).value:
        raise WitnessUndefined(f"C_phi is not coposinormal for {phi}")


def posinormal_witness(phi: MobiusMap, order: int) -> TruncMatrix:
    """Section of T = T_{1/h}* T_{1/(g∘σ⁻¹)} C_{φ∘σ⁻¹}, which satisfies C_φ = C_φ* T.

    Raises:
        WitnessUndefined: C_φ is not posinormal.
    """
    _require_posinormal(phi)
    if phi.is_constant:
        return np.eye(order, dtype=complex)
    return (
        toeplitz_matrix(reciprocal_h(phi), order).conj().T
        @ toeplitz_matrix(reciprocal_g_after_sigma_inv(phi), order)
        @ composition_matrix(phi_sigma_inv(phi), order)
    )


def coposinormal_witness(phi: MobiusMap, order: int) -> TruncMatrix:
    """Section of T = T_{g∘φ⁻¹} C_{σ∘φ⁻¹} T_h*, which satisfies C_φ* = C_φ T.

    Raises:
        WitnessUndefined: C_φ is not coposinormal.
    """
    _require_coposinormal(phi)
    if phi.is_constant:
        return np.eye(order, dtype=complex)
    return (
        toeplitz_matrix(g_after_phi_inv(phi), order)
        @ composition_matrix(sigma_phi_inv(phi), order)
        @ toeplitz_matrix(adjoint_triple(phi).h, order).conj().T
    )


def _adjoint_times_witness(phi: MobiusMap, columns: int, block: int) -> np.ndarray:
    """Rows i < `block`, columns l < `columns` of C_φ* T for the posinormal witness.

    Entry (i, l) is ⟨T_{1/h}*(uψˡ), φⁱ⟩ = ⟨uψˡ, φⁱ/h⟩ with u = 1/(g∘σ⁻¹) and
    ψ = φ∘σ⁻¹. Only φⁱ/h needs its tail bounded; uψˡ is exact on any prefix.
    """
    inverse_h = reciprocal_h(phi)
    length = series_length(phi, block, inverse_h)
    log.debug("Posinormal witness of %s expanded to %d coefficients", phi, length)
    left = _multiply(inverse_h, _power_block(phi, block, length))
    factor = reciprocal_g_after_sigma_inv(phi)
    psi = phi_sigma_inv(phi)
    slabs = [
        left.conj().T @ _multiply(factor, chunk)
        for chunk in _power_chunks(psi, columns, length)
    ]
    return np.hstack(slabs)


def posinormal_witness_residual(phi: MobiusMap, order: int) -> float:
    """Leading-block deviation of C_φ from C_φ* T."""
    _check_order(order)
    _require_posinormal(phi)
    if phi.is_constant:
        matrix = composition_matrix(phi, order)
        return _leading_deviation(matrix, matrix.conj().T)
    block = _leading_block(order)
    matrix = _power_block(phi, block, block)
    return _deviation(matrix, _adjoint_times_witness(phi, block, block))


def coposinormal_witness_residual(phi: MobiusMap, order: int) -> float:
    """Leading-block deviation of C_φ* from C_φ T.

    Rows of C_φ are summed out to `row_length`; the witness columns there are
    exact because T_h* maps eⱼ into the first j+1 coordinates.
    """
    _check_order(order)
    _require_coposinormal(phi)
    if phi.is_constant:
        matrix = composition_matrix(phi, order)
        return _leading_deviation(matrix.conj().T, matrix)
    block = _leading_block(order)
    rows = row_length(phi, block)
    log.debug("Coposinormal witness of %s expanded to %d rows", phi, rows)
    seeds = toeplitz_matrix(adjoint_triple(phi).h, block).conj().T
    powers = _power_block(sigma_phi_inv(phi), block, rows)
    witness = _multiply(g_after_phi_inv(phi), powers @ seeds)
    matrix = _power_block(phi, rows, block)
    return _deviation(matrix[:, :block].conj().T, matrix @ witness)


def interrupter_residual(phi: MobiusMap, order: int) -> InterrupterCheck:
    """Check AA* = A*PA for the interrupter P = TT* built from the posinormal witness.

    A*PA is formed as (A*T)(A*T)* with A*T expanded over as many columns as the
    rows of A need. The eigenvalue is taken from the N×N section of P.
    """
    witness = posinormal_witness(phi, order)
    interrupter = witness @ witness.conj().T
    eigenvalues = linalg.eigvalsh(interrupter)
    if phi.is_constant:
        matrix = composition_matrix(phi, order)
        adjoint = matrix.conj().T
        residual = _leading_deviation(matrix @ adjoint, adjoint @ interrupter @ matrix)
        return InterrupterCheck(residual, float(eigenvalues[0]))
    block = _leading_block(order)
    rows = row_length(phi, block)
    matrix = _power_block(phi, rows, block)
    product = _adjoint_times_witness(phi, rows, block)
    residual = _deviation(matrix @ matrix.conj().T, product @ product.conj().T)
    return InterrupterCheck(residual, float(eigenvalues[0]))


def _geometric(ratio: complex, size: int) -> np.ndarray:
    powers = np.ones(size, dtype=complex)
    powers[1:] = np.cumprod(np.full(size - 1, ratio, dtype=complex))
    return powers


def _kernel_coefficients(point: complex, order: int) -> np.ndarray:
    return _geometric(np.conj(point), order)


def _image_disk_chart(phi: MobiusMap) -> Tuple[complex, complex]:
    """ψ(0) and ψ-image of the zero constraint for ψ = (φ − w₀)/r₀.

    φ(D) is the disk D(w₀, r₀), so ψ is a disk automorphism; the second value
    is λ = −w₀/r₀, which lies in the disk exactly when 0 ∈ φ(D).
    """
    image = image_of_unit_circle(phi)
    center = complex(image.center)
    radius = math.sqrt(float(image.radius_sq))
    return (evaluate(phi, 0) - center) / radius, -center / radius


def _constraint_targets(point: complex, size: int) -> np.ndarray:
    """conj(λ)ᵏ for k < size, rescaled so no entry exceeds 1 in modulus."""
    if point == 0:
        targets = np.zeros(size, dtype=complex)
        targets[0] = 1
        return targets
    scale = (size - 1) * max(math.log(abs(point)), 0.0)
    return np.exp(np.arange(size) * np.log(np.conj(point)) - scale)


def range_membership_residual(phi: MobiusMap, order: int) -> float:
    """Relative change of the least-norm solution of the first `order` rows of C_φ* q = 1.

    Row i reads ⟨q, φⁱ⟩ = δᵢ₀. Rewritten in the powers of ψ = (φ − w₀)/r₀,
    which span the same polynomials in φ, the rows become ⟨q, ψᵏ⟩ = conj(λ)ᵏ.
    ψ is unimodular on the circle, so the Gram matrix of ψ⁰..ψ^(N−1) is the
    Hermitian Toeplitz matrix with entries ψ(0)^(k−j) and stays well
    conditioned. The value is ‖q_N − q_{N/2}‖/‖q_N‖, which tends to zero exactly
    when 1 lies in the range of C_φ*.
    """
    _check_order(order)
    _check_selfmap(phi)
    if phi.is_constant:
        # 1 solves every row when φ ≡ 0; otherwise rows 0 and 1 contradict
        return 0.0 if complex(phi.constant_value) == 0 else 1.0
    origin, point = _image_disk_chart(phi)
    gram = linalg.toeplitz(_geometric(np.conj(origin), order), _geometric(origin, order))
    targets = _constraint_targets(point, order)
    half = order // 2
    fine = linalg.solve(gram, targets, assume_a="pos")
    coarse = linalg.solve(gram[:half, :half], targets[:half], assume_a="pos")
    step = fine.copy()
    step[:half] -= coarse
    change = np.real(np.vdot(step, gram @ step))
    norm = np.real(np.vdot(fine, gram @ fine))
    return float(math.sqrt(max(change, 0.0) / norm))


def kernel_action_residual(phi: MobiusMap, alpha: complex, order: int) -> float:
    """Check C_φ*K_α = K_{φ(α)} and C_φK_α = conj(g(α))·h·K_{σ(α)} on sections.

    Raises:
        AlphaOutsideDisk: |α| ≥ 1.
    """
    alpha = complex(alpha)
    if abs(alpha) >= 1:
        raise AlphaOutsideDisk(f"Kernel point {alpha} is not in the open disk")
    triple = adjoint_triple(phi)
    block = _leading_block(order)
    matrix = composition_matrix(phi, order)
    kernel = _kernel_coefficients(alpha, order)

    adjoint_image = matrix.conj().T @ kernel
    expected_adjoint = _kernel_coefficients(evaluate(phi, alpha), order)
    first = np.max(np.abs(adjoint_image[:block] - expected_adjoint[:block]))

    image = matrix @ kernel
    expected_image = np.conj(evaluate(triple.g, alpha)) * (
        toeplitz_matrix(triple.h, order)
        @ _kernel_coefficients(evaluate(triple.sigma, alpha), order)
    )
    second = np.max(np.abs(image[:block] - expected_image[:block]))
    return float(max(first, second))


def interrupter_bound_estimate(phi: MobiusMap, order: int, ridge: float = 1e-10) -> float:
    """Experimental estimate of the least λ² with AA* ≤ λ²A*A.

    Largest generalized eigenvalue of AA* against A*A on the leading block, both
    expanded past the section. Compressions do not bound the true constant from
    either side.
    """
    _check_order(order)
    _check_selfmap(phi)
    block = _leading_block(order)
    rows = _power_block(phi, row_length(phi, block), block)
    columns = _power_block(phi, block, series_length(phi, block))
    outer = rows @ rows.conj().T
    inner = columns.conj().T @ columns
    eigenvalues = linalg.eigh(outer, inner + ridge * np.eye(block), eigvals_only=True)
    return float(eigenvalues[-1])


def trend_verdict(points: Sequence[Tuple[int, float]]) -> Tuple[str, float]:
    """Classify residuals over a ladder as decaying or stagnant.

    Roundoff-level final residuals count as decaying. A final residual above the
    decay cap, or last three values agreeing within the stagnation ratio, count
    as stagnant; otherwise the fitted log₂ slope against log₂ N decides.

    Returns:
        Verdict and fitted slope.
    """
    orders = np.array([order for order, _ in points], dtype=float)
    residuals = np.array([max(residual, RESIDUAL_FLOOR) for _, residual in points])
    slope = 0.0
    if len(points) >= 2:
        slope = float(np.polyfit(np.log2(orders), np.log2(residuals), 1)[0])
    final = last(residuals)
    if final <= CONVERGED:
        return TraceVerdict.DECAYING, slope
    if not final <= Config.conf["decay_cap"]:
        return TraceVerdict.STAGNANT, slope
    ratio = Config.conf["stagnation_ratio"]
    if len(residuals) >= 3 and all(
        abs(value - final) <= ratio * final for value in last(windowed(residuals, 3))
    ):
        return TraceVerdict.STAGNANT, slope
    if slope <= Config.conf["decay_slope"]:
        return TraceVerdict.DECAYING, slope
    return TraceVerdict.STAGNANT, slope


def residual_trace(
    name: str,
    measure: Callable[[MobiusMap, int], float],
    phi: MobiusMap,
    ladder: Optional[Sequence[int]] = None,
) -> ResidualTrace:
    """Evaluate `measure` over a ladder of truncation orders."""
    if ladder is None:
        ladder = Config.conf["ladder"]
    orders = sorted(set(ladder))
    for order in orders:
        _check_order(order)
    points = [(order, measure(phi, order)) for order in orders]
    verdict, slope = trend_verdict(points)
    slope = slope if math.isfinite(slope) else 0.0
    log.debug("%s trace for %s: %s (slope %.3f)", name, phi, verdict, slope)
    return ResidualTrace(name, points, verdict, slope)


def write_trace_csv(trace: ResidualTrace, path: Path):
    """Dump a trace as CSV with header `N,residual`."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["N", "residual"])
        for order, residual in trace.points:
            writer.writerow([order, repr(residual)])
