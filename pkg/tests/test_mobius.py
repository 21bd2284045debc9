"""Tests for the posilab.mobius module."""

import math
from fractions import Fraction

import numpy as np
import pytest
from pytest import fixture

from posilab.exceptions import (
    AllZeroCoefficients,
    ConstantMap,
    ConstantMapNotInvertible,
    EvaluationAtPole,
    IdentityMapAllFixed,
    InvalidParameter,
    NotASelfmap,
    ZeroDenominatorMap,
)
from posilab.mobius import (
    IDENTITY,
    INFINITY,
    Circle,
    Line,
    MapKind,
    apply,
    classify,
    compose,
    derivative_at,
    disk_automorphism,
    evaluate,
    fixed_points,
    image_of_unit_circle,
    inverse,
    is_disk_automorphism,
    is_identity,
    is_selfmap_of_disk,
    iterate_orbit,
    make_map,
    maps_projectively_equal,
    power_of,
    rotation_conjugate,
    zero_in_disk,
)
from posilab.scalars import ONE, ZERO, Cplx, I
from tests.corpus import random_fraction, random_selfmaps, rational_corpus, seeded_faker

HALF = Fraction(1, 2)


@fixture
def dilation():
    """z/(2−z), fixing 0 and 1."""
    return make_map(1, 0, -1, 2)


@fixture
def hyperbolic():
    """(z+1)/2, fixing 1 and infinity."""
    return make_map(1, 1, 0, 2)


@fixture
def parabolic():
    """((3/2)z + 1/2)/(−(1/2)z + 5/2), the parabolic map with parameter 1/2."""
    return make_map(Fraction(3, 2), HALF, -HALF, Fraction(5, 2))


def test_normalization():
    """Test that coefficients are scaled to d = 1, else c = 1, else a = 1."""
    assert make_map(2, 4, 0, 2).coefficients == (ONE, Cplx(2), ZERO, ONE)
    assert make_map(1, 0, -1, 2).coefficients == (Cplx(HALF), ZERO, Cplx(-HALF), ONE)
    assert make_map(2, 3, 4, 0).coefficients == (Cplx(HALF), Cplx(Fraction(3, 4)), ONE, ZERO)
    assert make_map(0, 5, 0, 5) == make_map(0, 1, 0, 1)


def test_invalid_coefficients():
    """Test that degenerate coefficient vectors are rejected."""
    with pytest.raises(AllZeroCoefficients):
        make_map(0, 0, 0, 0)
    with pytest.raises(ZeroDenominatorMap):
        make_map(1, 2, 0, 0)


def test_float_backend():
    """Test that one float coefficient moves the map to floats and drops roundoff."""
    f = make_map(0.5, 0.5, 1e-17, 1)
    assert not f.is_exact
    assert f.c == Cplx(0.0)
    assert make_map(1, 0, -1, 2).is_exact


def test_huge_exact_coefficients():
    """Test that exact maps never pass through floats and float conversion fails cleanly."""
    f = make_map(10**400, 0, 0, 10**401)
    assert f.coefficients == (Cplx(Fraction(1, 10)), ZERO, ZERO, ONE)
    with pytest.raises(InvalidParameter):
        make_map(10**400, 0.5, 0, 1)


def test_apply_extended_plane(dilation, hyperbolic):
    """Test evaluation at poles and infinity."""
    assert apply(dilation, Cplx(2)) is INFINITY
    assert apply(dilation, INFINITY) == Cplx(-1)
    assert apply(hyperbolic, INFINITY) is INFINITY
    assert dilation(1) == ONE
    assert apply(make_map(0, HALF, 0, 1), INFINITY) == Cplx(HALF)


def test_evaluate(dilation):
    """Test float evaluation and the pole error."""
    assert evaluate(dilation, 0.5) == pytest.approx(1 / 3)
    with pytest.raises(EvaluationAtPole):
        evaluate(dilation, 2)


def test_compose_and_inverse(dilation):
    """Test composition, inversion and projective equality."""
    assert maps_projectively_equal(compose(dilation, dilation), make_map(1, 0, -3, 4))
    assert maps_projectively_equal(inverse(dilation), make_map(2, 0, 1, 1))
    assert is_identity(compose(dilation, inverse(dilation)))
    assert is_identity(compose(inverse(dilation), dilation))
    with pytest.raises(ConstantMapNotInvertible):
        inverse(make_map(0, HALF, 0, 1))


def test_power_of(parabolic):
    """Test that powers of the parabolic map add parameters."""
    assert maps_projectively_equal(power_of(parabolic, 2), make_map(1, 1, -1, 3))
    assert power_of(parabolic, 1) == parabolic
    assert maps_projectively_equal(
        power_of(parabolic, 5), compose(power_of(parabolic, 2), power_of(parabolic, 3))
    )
    with pytest.raises(ValueError):
        power_of(parabolic, 0)


def test_derivative(hyperbolic, dilation):
    """Test φ' at fixed points."""
    assert derivative_at(hyperbolic, ONE) == Cplx(HALF)
    assert derivative_at(dilation, ZERO) == Cplx(HALF)
    assert derivative_at(dilation, ONE) == Cplx(2)


def test_fixed_points(dilation, hyperbolic, parabolic):
    """Test fixed points including infinity and double points."""
    assert fixed_points(dilation) == [ZERO, ONE]
    assert fixed_points(hyperbolic) == [ONE, INFINITY]
    assert fixed_points(parabolic) == [ONE]
    assert fixed_points(make_map(1, 1, 0, 1)) == [INFINITY]
    with pytest.raises(ConstantMap):
        fixed_points(make_map(0, HALF, 0, 1))
    with pytest.raises(IdentityMapAllFixed):
        fixed_points(IDENTITY)


def test_fixed_points_irrational():
    """Test that irrational fixed points fall back to floats."""
    points = fixed_points(make_map(0, 1, 1, 1))
    assert all(not point.is_exact for point in points)
    assert sorted(complex(point).real for point in points) == pytest.approx(
        [(-1 - 5**0.5) / 2, (-1 + 5**0.5) / 2]
    )


def test_image_of_unit_circle(hyperbolic):
    """Test circle and line images."""
    assert image_of_unit_circle(hyperbolic) == Circle(Cplx(HALF), Fraction(1, 4))
    assert isinstance(image_of_unit_circle(make_map(1, 0, -1, 1)), Line)


def test_selfmap(dilation, hyperbolic, parabolic):
    """Test the disk selfmap predicate."""
    for f in (dilation, hyperbolic, parabolic, IDENTITY, make_map(0, HALF, 0, 1)):
        assert is_selfmap_of_disk(f)
    assert not is_selfmap_of_disk(make_map(2, 0, 0, 1))
    assert not is_selfmap_of_disk(make_map(0, 1, 1, 0))
    assert not is_selfmap_of_disk(make_map(0, 1, 0, 1))
    assert not is_selfmap_of_disk(make_map(1, HALF, 0, 1))
    # image circle inside the disk, but reached through the exterior
    assert not is_selfmap_of_disk(make_map(0, 1, 2, 0))


def test_automorphisms():
    """Test automorphism detection and the involution τ_w."""
    tau = disk_automorphism(Fraction(1, 4))
    assert is_disk_automorphism(tau)
    assert is_identity(compose(tau, tau))
    assert tau(0) == Cplx(Fraction(1, 4))
    assert is_disk_automorphism(make_map(I, 0, 0, 1))
    assert not is_disk_automorphism(make_map(HALF, 0, 0, 1))
    assert not is_disk_automorphism(make_map(0, 0, 0, 1))


def test_rotation_conjugate(hyperbolic):
    """Test that w̄φ(wz) moves a fixed point w to 1."""
    rotated = rotation_conjugate(make_map(1, -I, 0, 2), -I)
    assert rotated(1) == ONE
    assert rotation_conjugate(hyperbolic, ONE) == hyperbolic


@pytest.mark.parametrize(
    "coefficients, kind",
    [
        ((1, 0, -1, 2), MapKind.DILATION_INTERIOR_BOUNDARY),
        ((1, 1, 0, 2), MapKind.HYPERBOLIC_NON_AUTOMORPHISM),
        ((3, 1, 1, 3), MapKind.HYPERBOLIC_AUTOMORPHISM),
        ((Fraction(3, 2), HALF, -HALF, Fraction(5, 2)), MapKind.PARABOLIC_NON_AUTOMORPHISM),
        ((2 - I, I, -I, 2 + I), MapKind.PARABOLIC_AUTOMORPHISM),
        ((I, 0, 0, 1), MapKind.ELLIPTIC_AUTOMORPHISM),
        ((HALF, 0, 0, 1), MapKind.DILATION_INTERIOR_EXTERIOR),
        ((1, 0, 0, 1), MapKind.IDENTITY),
        ((0, HALF, 0, 1), MapKind.CONSTANT),
    ],
)
def test_classify_kinds(coefficients, kind):
    """Test the fixed-point taxonomy on one map per kind."""
    assert classify(make_map(*coefficients)).kind is kind


def test_classify_points(dilation, hyperbolic):
    """Test Denjoy-Wolff point, second fixed point and derivative."""
    map_class = classify(hyperbolic)
    assert map_class.denjoy_wolff == ONE
    assert map_class.second_fixed_point is INFINITY
    assert map_class.derivative_at_dw == Cplx(HALF)
    assert not map_class.marginal
    assert classify(make_map(3, 1, 1, 3)).denjoy_wolff == ONE
    assert classify(dilation).second_fixed_point == ONE


def test_classify_rejects_non_selfmap():
    """Test that classification needs a selfmap."""
    with pytest.raises(NotASelfmap):
        classify(make_map(2, 0, 0, 1))


def test_classify_float_marginal():
    """Test that a float map on a boundary within eps is flagged marginal."""
    map_class = classify(make_map(1.0, 1.0 + 1e-14, 0.0, 2.0))
    assert map_class.kind is MapKind.HYPERBOLIC_NON_AUTOMORPHISM
    assert map_class.marginal


def test_zero_in_disk(dilation, hyperbolic, parabolic):
    """Test the zero of the map inside the disk."""
    assert zero_in_disk(dilation) == ZERO
    assert zero_in_disk(hyperbolic) is None
    assert zero_in_disk(parabolic) == Cplx(Fraction(-1, 3))
    assert zero_in_disk(make_map(0, HALF, 0, 1)) is None


TAU_QUARTER = disk_automorphism(Fraction(1, 4))


@pytest.mark.parametrize(
    "f",
    [
        make_map(1, 1, 0, 2),
        make_map(3, 1, 1, 3),
        make_map(1, Fraction(1, 4), 0, 2),
        compose(TAU_QUARTER, compose(make_map(HALF, 0, 0, 1), TAU_QUARTER)),
        make_map(Fraction(3, 4), 0, Fraction(-1, 4), 1),
    ],
)
def test_denjoy_wolff_orbit(f):
    """Test that the orbit of 0 converges to the reported Denjoy-Wolff point."""
    map_class = classify(f)
    assert abs(iterate_orbit(f, 200) - complex(map_class.denjoy_wolff)) < 1e-6


def gaussian_integer_maps(count, seed=11):
    """Nonconstant maps with Gaussian integer coefficients in [−4, 4], selfmaps or not."""
    fake = seeded_faker(seed)
    maps = []
    while len(maps) < count:
        coefficients = [
            Cplx(fake.random_int(min=-4, max=4), fake.random_int(min=-4, max=4))
            for _ in range(4)
        ]
        if coefficients[2].abs2() + coefficients[3].abs2() == 0:
            continue
        f = make_map(*coefficients)
        if not f.is_constant:
            maps.append(f)
    return maps


def sampled_selfmap(f):
    """Selfmap verdict from |f| on 720 boundary points, refined around the peak."""
    if f.d.abs2() <= f.c.abs2():
        return False
    a, b, c, d = (complex(coefficient) for coefficient in f.coefficients)

    def modulus(theta):
        z = np.exp(1j * theta)
        return np.abs((a * z + b) / (c * z + d))

    coarse = np.linspace(0, 2 * np.pi, 720, endpoint=False)
    peak = coarse[np.argmax(modulus(coarse))]
    fine = np.linspace(peak - np.pi / 360, peak + np.pi / 360, 2001)
    return modulus(fine).max() <= 1 + 1e-9 and abs(b / d) < 1


def test_selfmap_matches_boundary_sampling():
    """Test the exact selfmap predicate against boundary sampling on random maps."""
    verdicts = [is_selfmap_of_disk(f) for f in gaussian_integer_maps(200)]
    assert verdicts == [sampled_selfmap(f) for f in gaussian_integer_maps(200)]
    assert any(verdicts) and not all(verdicts)


def test_selfmap_under_coefficient_scaling():
    """Test that rescaling all four coefficients changes neither the map nor the verdict."""
    fake = seeded_faker(12)
    for f in gaussian_integer_maps(200):
        k = Cplx(random_fraction(fake), random_fraction(fake))
        if k.abs2() == 0:
            k = Cplx(Fraction(3, 7), -1)
        scaled = make_map(*(k * coefficient for coefficient in f.coefficients))
        assert maps_projectively_equal(scaled, f)
        assert is_selfmap_of_disk(scaled) == is_selfmap_of_disk(f)


def test_compose_with_inverse_on_corpus():
    """Test f∘f⁻¹ = f⁻¹∘f = id exactly on random selfmaps."""
    for f in random_selfmaps(200, seed=13):
        assert is_identity(compose(f, inverse(f)))
        assert is_identity(compose(inverse(f), f))


def test_denjoy_wolff_orbit_on_corpus():
    """Test orbit convergence to the Denjoy-Wolff point on random non-elliptic selfmaps.

    Geometric convergence is iterated until the contraction rate reaches 1e-8.
    Parabolic orbits approach their point like 1/n, so only the tenfold step
    count is required to shrink the distance at least fivefold.
    """
    parabolic_kinds = {MapKind.PARABOLIC_AUTOMORPHISM, MapKind.PARABOLIC_NON_AUTOMORPHISM}
    for f in [*random_selfmaps(150, seed=14), *rational_corpus(150, seed=15)]:
        map_class = classify(f)
        if map_class.elliptic:
            continue
        point = complex(map_class.denjoy_wolff)
        if map_class.kind in parabolic_kinds:
            near = abs(iterate_orbit(f, 200) - point)
            far = abs(iterate_orbit(f, 2000) - point)
            assert far < near / 5
            continue
        rate = abs(complex(map_class.derivative_at_dw))
        steps = max(200, math.ceil(-8 / math.log10(rate)))
        assert abs(iterate_orbit(f, steps) - point) < 1e-6
