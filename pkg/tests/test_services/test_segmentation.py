"""
Tests for sliding-window coefficient tracks and change detection.
"""

import numpy as np
import pytest
from pydantic import ValidationError

from epsicomp.service import segmentation
from epsicomp.service.estimation import SweepConfig
from epsicomp.service.function_model import SampledFunction
from epsicomp.service.generators import generate
from epsicomp.service.segmentation import CoefficientTrack, TrackRow, WindowConfig
from epsimeta.generators import Sine, Weierstrass

QUICK = SweepConfig(schemes_per_fraction=2)


def step_track(shift: float = 1.0) -> CoefficientTrack:
    rng = np.random.default_rng(0)
    rows = []

    for index, start in enumerate(range(0, 10000, 250)):
        A, B = (-1.0, -1.0) if index < 20 else (-1.0 - shift, -1.0 - shift / 2)
        noise = 0.01 * rng.normal(size=2)
        rows.append(
            TrackRow(
                start=start,
                A=A + noise[0],
                B=B + noise[1],
                r_squared=0.99,
                degenerate=False,
            )
        )

    return CoefficientTrack(window_length=1000, hop=250, series_length=10750, rows=rows)


def test_window_config():
    with pytest.raises(ValidationError):
        WindowConfig(window_length=50, hop=10)

    with pytest.raises(ValidationError):
        WindowConfig(window_length=100, hop=0)


def test_robust_standardize():
    z = segmentation.robust_standardize(
        np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0], [100.0, 5.0]])
    )

    # Median 2.5, MAD 1
    np.testing.assert_allclose(z[:, 0], (np.array([1.0, 2.0, 3.0, 100.0]) - 2.5) / 1.4826)
    np.testing.assert_array_equal(z[:, 1], 0.0)


def test_cusum_statistic():
    z = np.concatenate([np.zeros((6, 1)), np.ones((4, 1))])
    split, statistic = segmentation.cusum_statistic(z)

    assert split == 6
    assert statistic > 0.0

    split, statistic = segmentation.cusum_statistic(np.zeros((8, 2)))

    assert statistic == 0.0
    assert 2 <= split <= 6


def test_effect_size():
    left = np.array([[0.0], [0.1], [-0.1]])
    right = np.array([[1.0], [1.1], [0.9]])

    assert segmentation.effect_size(left, right) == pytest.approx(1.0 / (1.4826 * 0.1))
    assert segmentation.effect_size(np.zeros((2, 1)), np.ones((2, 1))) == float("inf")
    assert segmentation.effect_size(np.zeros((2, 1)), np.zeros((2, 1))) == 0.0


def test_detect_single_step():
    result = segmentation.detect_changes(step_track())

    assert result.change_points == [5375]
    assert any(x.accepted and x.split_after_start == 4750 for x in result.detector_stats)


def test_no_change_in_flat_track():
    track = step_track(shift=0.0)

    assert segmentation.detect_changes(track).change_points == []


def test_identical_rows():
    rows = [
        TrackRow(start=x, A=-1.0, B=-1.0, r_squared=1.0, degenerate=False)
        for x in range(0, 2500, 250)
    ]
    track = CoefficientTrack(window_length=1000, hop=250, series_length=3250, rows=rows)
    result = segmentation.detect_changes(track)

    assert result.change_points == []
    assert all(not x.accepted for x in result.detector_stats)


def test_threshold_multiplier_suppresses_changes():
    result = segmentation.detect_changes(step_track(), threshold_multiplier=1e6)

    assert result.change_points == []


def test_detection_is_seeded():
    track = step_track(shift=0.05)

    assert segmentation.detect_changes(track, seed=3) == segmentation.detect_changes(
        track, seed=3
    )


def test_too_few_windows():
    rows = [
        TrackRow(start=x, A=0.0, B=0.0, r_squared=0.0, degenerate=x > 250)
        for x in range(0, 2500, 250)
    ]
    track = CoefficientTrack(window_length=1000, hop=250, series_length=3250, rows=rows)

    with pytest.raises(segmentation.TooFewWindows):
        segmentation.detect_changes(track)


def test_result_validation():
    with pytest.raises(ValidationError):
        segmentation.SegmentationResult(
            tracks=step_track(), change_points=[6000, 5000], detector_stats=[]
        )

    with pytest.raises(ValidationError):
        segmentation.SegmentationResult(
            tracks=step_track(), change_points=[20000], detector_stats=[]
        )


def test_coefficient_track(weierstrass):
    config = WindowConfig(window_length=200, hop=100, sweep=QUICK)
    series = SampledFunction.from_series(weierstrass.values[:1000])

    track = segmentation.coefficient_track(series, config)

    assert [x.start for x in track.rows] == list(range(0, 801, 100))
    assert track.series_length == 1000
    assert all(not x.degenerate for x in track.rows)

    assert segmentation.coefficient_track(series, config, threads=4) == track


def test_single_window(weierstrass):
    series = SampledFunction.from_series(weierstrass.values[:200])
    track = segmentation.coefficient_track(
        series, WindowConfig(window_length=200, hop=50, sweep=QUICK)
    )

    assert len(track.rows) == 1


def test_series_too_short(weierstrass):
    series = SampledFunction.from_series(weierstrass.values[:150])

    with pytest.raises(segmentation.SeriesTooShort):
        segmentation.coefficient_track(
            series, WindowConfig(window_length=200, hop=50, sweep=QUICK)
        )


def test_constant_series_has_no_usable_windows():
    series = SampledFunction.from_series(np.full(1200, 3.0))
    config = WindowConfig(window_length=100, hop=100, sweep=QUICK)

    track = segmentation.coefficient_track(series, config)

    assert all(x.degenerate for x in track.rows)

    with pytest.raises(segmentation.TooFewWindows):
        segmentation.segment(series, config)


@pytest.mark.slow
def test_detects_change_of_regime():
    rough = generate(Weierstrass(n_points=5000)).values
    smooth = generate(Sine(n_points=5000, freq=50.0)).values
    series = SampledFunction.from_series(np.concatenate([rough, smooth]))

    result = segmentation.segment(
        series, WindowConfig(window_length=1000, hop=250), threads=4
    )

    assert len(result.change_points) == 1
    assert abs(result.change_points[0] - 5000) <= 1000


@pytest.mark.slow
def test_homogeneous_series_has_no_changes():
    series = generate(Weierstrass(n_points=10000))

    result = segmentation.segment(
        series, WindowConfig(window_length=1000, hop=250), threads=4
    )

    assert result.change_points == []
