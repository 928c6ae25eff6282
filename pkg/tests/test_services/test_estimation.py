"""
Tests for the error-curve sweep, the coefficient fit and the difference
profile.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from epsicomp.service import estimation
from epsicomp.service.estimation import CurveRow, RecoveryErrorCurve, SweepConfig
from epsicomp.service.function_model import SampledFunction, ZeroFunction, normalize
from epsicomp.service.generators import generate
from epsimeta.generators import Affine, FbmMidpoint, Weierstrass
from epsimeta.methods import PiecewiseLinear


def power_law_curve(A: float, B: float) -> RecoveryErrorCurve:
    return RecoveryErrorCurve(
        rows=[
            CurveRow(
                fraction=x, mean_error=math.exp(A) * x**B, stddev=0.0, n_schemes=1
            )
            for x in estimation.DEFAULT_FRACTIONS
        ]
    )


def test_stratified_selection():
    selection = estimation.stratified_selection(10, 0.5, seed=3)

    assert selection.kept_indices.size == 5
    assert selection.kept_indices[0] == 0
    assert selection.kept_indices[-1] == 9
    np.testing.assert_array_equal(
        selection.kept_indices,
        estimation.stratified_selection(10, 0.5, seed=3).kept_indices,
    )

    assert estimation.stratified_selection(10, 0.95, seed=3).kept_indices.size == 9

    with pytest.raises(estimation.TooFewKept):
        estimation.stratified_selection(10, 0.1, seed=3)


def test_stratified_gaps_vary_with_fraction():
    # The widest gap keeps shrinking as the fraction grows, not only when
    # the mean block size crosses an integer
    widest = [
        np.mean(
            [
                np.diff(
                    estimation.stratified_selection(5000, fraction, seed).kept_indices
                ).max()
                for seed in range(20)
            ]
        )
        for fraction in (0.55, 0.65, 0.75)
    ]

    assert widest[0] > widest[1] > widest[2]


def test_uniform_selection():
    selection = estimation.uniform_selection(100, 0.3, seed=11)

    assert selection.kept_indices.size == 30
    assert selection.kept_indices[0] == 0
    assert selection.kept_indices[-1] == 99


def test_nested_selection_grows_with_fraction():
    for seed in range(5):
        small = set(estimation.nested_selection(100, 0.3, seed).kept_indices)
        large = set(estimation.nested_selection(100, 0.6, seed).kept_indices)

        assert small < large


def test_scheme_seed():
    assert estimation.scheme_seed(0, 1, 2) == estimation.scheme_seed(0, 1, 2)
    assert estimation.scheme_seed(0, 1, 2) != estimation.scheme_seed(0, 2, 1)
    assert estimation.scheme_seed(0, 1, 2) != estimation.scheme_seed(1, 1, 2)


def test_sweep_config_validation():
    SweepConfig()

    with pytest.raises(ValidationError):
        SweepConfig(fractions=(0.5, 0.4, 0.6))

    with pytest.raises(ValidationError):
        SweepConfig(fractions=(0.0, 0.5))

    with pytest.raises(ValidationError):
        SweepConfig(fit_interval=(0.8, 0.2))

    with pytest.raises(ValidationError):
        SweepConfig(fit_interval=(0.5, 0.55))

    with pytest.raises(ValidationError):
        SweepConfig(family=())

    with pytest.raises(ValidationError):
        SweepConfig(schemes_per_fraction=0)


def test_fit_exact_power_law():
    coefficients = estimation.fit_complexity(power_law_curve(-3.0, 2.0))

    assert coefficients.A == pytest.approx(-3.0)
    assert coefficients.B == pytest.approx(2.0)
    assert coefficients.r_squared == pytest.approx(1.0)
    assert coefficients.n_points_fit == 13
    assert coefficients.interval_used == (0.2, 0.8)
    assert not coefficients.degenerate
    assert coefficients.stable


def test_fit_respects_interval():
    coefficients = estimation.fit_complexity(power_law_curve(1.0, -0.5), (0.3, 0.5))

    assert coefficients.n_points_fit == 5
    assert coefficients.B == pytest.approx(-0.5)


def test_fit_degenerate():
    curve = power_law_curve(0.0, 1.0)
    curve = RecoveryErrorCurve(
        rows=[x.model_copy(update={"mean_error": 0.0}) for x in curve.rows]
    )

    coefficients = estimation.fit_complexity(curve)

    assert coefficients.degenerate
    assert coefficients.A == 0.0
    assert coefficients.B == 0.0
    assert coefficients.reason

    with pytest.raises(estimation.DegenerateFit):
        estimation.fit_complexity(curve, raise_on_degenerate=True)


def test_fit_too_few_rows():
    with pytest.raises(estimation.TooFewRows):
        estimation.fit_complexity(power_law_curve(0.0, -1.0), (0.5, 0.55))


def test_leave_one_out_slopes():
    slopes = estimation.leave_one_out_slopes(power_law_curve(0.5, -1.5))

    assert slopes.size == 13
    np.testing.assert_allclose(slopes, -1.5)

    assert estimation.leave_one_out_slopes(
        power_law_curve(0.5, -1.5), (0.3, 0.4)
    ).size == 0


def test_unstable_fit_is_flagged():
    # One far row carries the whole slope, and it is off the power law
    fractions = (0.05,) + tuple(round(0.5 + 0.01 * x, 2) for x in range(11))
    rows = [
        CurveRow(
            fraction=x,
            mean_error=(50.0 if x == 0.05 else 1.0) / x,
            stddev=0.0,
            n_schemes=1,
        )
        for x in fractions
    ]

    coefficients = estimation.fit_complexity(RecoveryErrorCurve(rows=rows), (0.05, 0.6))

    assert coefficients.n_points_fit == 12
    assert not coefficients.stable


def test_curve_rows_must_be_ordered():
    with pytest.raises(ValidationError):
        RecoveryErrorCurve(
            rows=[
                CurveRow(fraction=0.5, mean_error=0.1, stddev=0.0, n_schemes=1),
                CurveRow(fraction=0.4, mean_error=0.1, stddev=0.0, n_schemes=1),
            ]
        )


def test_error_at_fraction(square):
    row = estimation.error_at_fraction(square, 0.3, SweepConfig(schemes_per_fraction=4))

    assert row.fraction == 0.3
    assert row.n_schemes == 4
    assert row.mean_error >= 0.0


def test_error_curve_requires_series():
    plane = SampledFunction(dim=2, points_per_axis=3, values=np.ones(9), normalized=True)

    with pytest.raises(estimation.UnsupportedDimension):
        estimation.error_curve(plane)


def test_error_curve_independent_of_threads(square):
    config = SweepConfig(schemes_per_fraction=3, rng_seed=5)

    serial = estimation.error_curve(square, config, threads=1)
    parallel = estimation.error_curve(square, config, threads=4)

    assert serial == parallel


def test_error_curve_depends_on_seed(weierstrass):
    first = estimation.error_curve(weierstrass, SweepConfig(schemes_per_fraction=2))
    second = estimation.error_curve(
        weierstrass, SweepConfig(schemes_per_fraction=2, rng_seed=1)
    )

    assert first != second


def test_nested_errors_nonincreasing(square):
    config = SweepConfig(
        schemes_per_fraction=4, nested=True, family=(PiecewiseLinear(),)
    )
    curve = estimation.error_curve(square, config)

    assert np.all(np.diff(curve.mean_errors) <= 1e-15)


def test_estimate_affine_is_degenerate():
    curve, coefficients = estimation.estimate(
        generate(Affine(a=3.0, b=1.0, n_points=201)), SweepConfig(schemes_per_fraction=2)
    )

    assert len(curve.rows) == len(estimation.DEFAULT_FRACTIONS)
    assert coefficients.degenerate


def test_difference_series():
    f = estimation.difference_series(SampledFunction.from_series([1.0, 2.0, 4.0]), 1)

    assert f.normalized
    np.testing.assert_array_equal(f.values, [0.5, 1.0])

    original = SampledFunction.from_series([1.0, 2.0, 4.0])

    assert estimation.difference_series(original, 0) is original

    with pytest.raises(ZeroFunction):
        estimation.difference_series(
            SampledFunction.from_series([1.0, 3.0, 5.0, 7.0, 9.0]), 2
        )

    with pytest.raises(estimation.OrderTooHigh):
        estimation.difference_series(SampledFunction.from_series([1.0, 2.0, 4.0]), 2)


def test_difference_series_scale_free(weierstrass):
    scaled = SampledFunction.from_series(4.0 * weierstrass.values)

    np.testing.assert_array_equal(
        estimation.difference_series(scaled, 1).values,
        estimation.difference_series(weierstrass, 1).values,
    )


def test_profile_of_integer_ramp():
    config = SweepConfig(schemes_per_fraction=2, difference_orders=2)
    entries = estimation.coefficient_profile(
        SampledFunction.from_series(np.arange(101.0)), config
    )

    assert [x.order for x in entries] == [0, 1, 2]
    assert all(x.coefficients.degenerate for x in entries)
    assert "zero" in entries[2].coefficients.reason.lower()


@pytest.mark.slow
@pytest.mark.parametrize(
    "spec",
    [Weierstrass(n_points=5000), FbmMidpoint(n_points=5000, hurst=0.5, seed=1)],
)
def test_rough_functions_follow_power_law(spec):
    _, coefficients = estimation.estimate(normalize(generate(spec)), threads=4)

    assert not coefficients.degenerate
    assert coefficients.B < 0.0
    assert coefficients.r_squared >= 0.9


@pytest.mark.slow
def test_profile_of_weierstrass():
    config = SweepConfig(difference_orders=2)
    entries = estimation.coefficient_profile(
        normalize(generate(Weierstrass(n_points=5000))), config, threads=4
    )

    assert len(entries) == 3
    assert all(not x.coefficients.degenerate for x in entries)
