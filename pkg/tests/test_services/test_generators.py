"""
Tests for the synthetic test functions.
"""

import math

import numpy as np
import pytest
from scipy import stats

from epsicomp.service import generators
from epsicomp.service.function_model import normalize
from epsimeta.generators import (
    Affine,
    FbmMidpoint,
    LogisticMap,
    Polynomial,
    Sine,
    Weierstrass,
)


def test_build_spec():
    spec = generators.build_spec("weierstrass", n_points=64, a=None, hurst=0.3)

    assert spec == Weierstrass(n_points=64)
    assert spec.terms == 40

    assert generators.build_spec("polynomial", coeffs=[1, 0, 2]).coeffs == (1.0, 0.0, 2.0)

    with pytest.raises(generators.InvalidSpec):
        generators.build_spec("fourier")

    with pytest.raises(generators.InvalidSpec):
        generators.build_spec("weierstrass", b=4)

    with pytest.raises(generators.InvalidSpec):
        generators.build_spec("weierstrass", a=0.5, terms=10)

    with pytest.raises(generators.InvalidSpec):
        generators.build_spec("fbm", hurst=1.0)


def test_affine_and_polynomial():
    np.testing.assert_allclose(
        generators.generate(Affine(a=2.0, b=1.0, n_points=3)).values, [1.0, 2.0, 3.0]
    )
    np.testing.assert_allclose(
        generators.generate(Polynomial(coeffs=(1.0, 0.0, 1.0), n_points=3)).values,
        [1.0, 1.25, 2.0],
    )


def test_sine():
    f = generators.generate(Sine(n_points=5))

    np.testing.assert_allclose(f.values, [0.0, 1.0, 0.0, -1.0, 0.0], atol=1e-15)


def test_weierstrass():
    f = generators.generate(Weierstrass(n_points=4096))

    assert f.points_per_axis == 4096
    assert not f.normalized
    # sum of a^n at t = 0
    assert f.values[0] == pytest.approx(2.0, abs=1e-11)
    # cos(b^n pi) = -1 for odd b
    assert f.values[-1] == pytest.approx(-2.0, abs=1e-11)


def test_weierstrass_matches_direct_sum():
    spec = Weierstrass(n_points=9, a=0.1, b=5)
    t = np.linspace(0.0, 1.0, 9)
    direct = sum(spec.a**n * np.cos(spec.b**n * np.pi * t) for n in range(spec.terms))

    np.testing.assert_allclose(generators.generate(spec).values, direct, atol=1e-12)


def test_fbm_is_reproducible():
    spec = FbmMidpoint(n_points=1025, hurst=0.3, seed=4)

    np.testing.assert_array_equal(
        generators.generate(spec).values, generators.generate(spec).values
    )
    assert generators.generate(spec).values[0] == 0.0

    other = generators.generate(spec.model_copy(update={"seed": 5}))

    assert not np.array_equal(other.values, generators.generate(spec).values)


def test_fbm_off_power_of_two():
    f = generators.generate(FbmMidpoint(n_points=1000, hurst=0.7))

    assert f.points_per_axis == 1000
    assert np.all(np.isfinite(f.values))


@pytest.mark.parametrize("hurst", [0.3, 0.5, 0.7])
def test_fbm_increment_scaling(hurst):
    # E|x(t + h) - x(t)|^2 grows as h^(2H)
    f = generators.generate(FbmMidpoint(n_points=2**14 + 1, hurst=hurst, seed=1))
    lags = 2 ** np.arange(0, 8)
    variances = [np.mean(np.diff(f.values[::lag]) ** 2) for lag in lags]

    slope = stats.linregress(np.log(lags), np.log(variances)).slope

    assert slope == pytest.approx(2 * hurst, abs=0.15)


def test_logistic_map():
    f = generators.generate(LogisticMap(n_points=4, r=2.0, x0=0.25))

    np.testing.assert_allclose(f.values, [0.25, 0.375, 0.46875, 0.498046875])


def test_nominal_holder_exponent():
    assert generators.nominal_holder_exponent(Weierstrass()) == pytest.approx(
        math.log(2) / math.log(3)
    )
    assert generators.nominal_holder_exponent(FbmMidpoint(hurst=0.3)) == 0.3
    assert generators.nominal_holder_exponent(Sine()) == 1.0
    assert generators.nominal_holder_exponent(LogisticMap()) is None


def test_holder_ratio_scan():
    f = normalize(generators.generate(Weierstrass(n_points=4096)))
    p = generators.nominal_holder_exponent(Weierstrass())
    lags = 2 ** np.arange(0, 10)

    spacings, ratios = generators.holder_ratio_scan(f, p, lags)
    flat = stats.linregress(np.log(spacings), np.log(ratios)).slope

    # At the nominal exponent the ratio neither grows nor vanishes
    assert abs(flat) < 0.1

    _, ratios = generators.holder_ratio_scan(f, p + 0.15, lags)
    steeper = stats.linregress(np.log(spacings), np.log(ratios)).slope

    assert steeper == pytest.approx(flat - 0.15)
    assert steeper < -0.05


def test_empirical_holder_constant(line):
    assert generators.empirical_holder_constant(line, 1.0) == pytest.approx(1.0)
