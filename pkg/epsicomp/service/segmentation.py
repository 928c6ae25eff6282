"""
Sliding-window complexity coefficients of a long series, and detection of
the points where the coefficient track changes level.

Every window is normalized on its own and estimated with the full sweep,
giving a track of (A, B) pairs. Changes are located by binary segmentation
with a cumulative-sum statistic on the robustly standardized track. A
candidate is kept when its statistic beats a seeded permutation null and
the medians on either side differ by a minimum effect size.
"""

import math

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator

from epsicomp.errors import DataError
from epsicomp.service.approximation import UnsupportedDimension
from epsicomp.service.estimation import (
    ComplexityCoefficients,
    SweepConfig,
    error_curve,
    fit_complexity,
)
from epsicomp.service.function_model import SampledFunction, ZeroFunction, normalize
from epsicomp.service.parallel import parallel_map

MAD_TO_SIGMA = 1.4826
NULL_PERCENTILE = 95.0
MINIMUM_WINDOWS = 4


class SeriesTooShort(DataError):
    pass


class TooFewWindows(DataError):
    pass


class WindowConfig(BaseModel):
    window_length: int = Field(ge=100)
    hop: int = Field(ge=1)
    sweep: SweepConfig = SweepConfig()

    model_config = ConfigDict(frozen=True)


class TrackRow(BaseModel):
    start: int
    A: float
    B: float
    r_squared: float
    degenerate: bool

    model_config = ConfigDict(frozen=True)


class CoefficientTrack(BaseModel):
    window_length: int
    hop: int
    series_length: int
    rows: list[TrackRow]

    model_config = ConfigDict(frozen=True)

    @property
    def usable(self) -> list[TrackRow]:
        return [x for x in self.rows if not x.degenerate]


class DetectorStat(BaseModel):
    """
    One candidate split of the track: the window after which the split
    falls, the sample index it maps to, the cumulative-sum statistic, the
    permutation threshold it was held against, and the effect size.
    """

    index: int
    split_after_start: int
    statistic: float
    threshold: float
    effect: float
    accepted: bool

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")


class SegmentationResult(BaseModel):
    tracks: CoefficientTrack
    change_points: list[int]
    detector_stats: list[DetectorStat]

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_change_points(self) -> "SegmentationResult":
        if self.change_points != sorted(self.change_points):
            raise ValueError("Change points must be sorted")

        if any(not 0 <= x < self.tracks.series_length for x in self.change_points):
            raise ValueError("Change points must lie within the series")

        return self


def _window_coefficients(
    series: SampledFunction, start: int, config: WindowConfig
) -> TrackRow:
    values = series.values[start : start + config.window_length]

    try:
        window = normalize(SampledFunction.from_series(values))
    except ZeroFunction:
        coefficients = ComplexityCoefficients.degenerate_fit(
            config.sweep.fit_interval, reason="all values are zero"
        )
    else:
        curve = error_curve(window, config.sweep)
        coefficients = fit_complexity(
            curve, config.sweep.fit_interval, config.sweep.degeneracy_floor
        )

    logger.debug("Window at {}: A={} B={}", start, coefficients.A, coefficients.B)

    return TrackRow(
        start=start,
        A=coefficients.A,
        B=coefficients.B,
        r_squared=coefficients.r_squared,
        degenerate=coefficients.degenerate,
    )


def coefficient_track(
    series: SampledFunction, config: WindowConfig, threads: int = 1
) -> CoefficientTrack:
    """
    Complexity coefficients of every window of ``config.window_length``
    samples, starting every ``config.hop`` samples. Windows run in parallel.

    Raises
    ------
    SeriesTooShort
        If the series is shorter than one window.
    """

    if series.dim != 1:
        raise UnsupportedDimension("Segmentation is only available for 1-d series")

    length = series.n_total

    if length < config.window_length:
        raise SeriesTooShort(
            f"A series of {length} samples is shorter than the window of "
            f"{config.window_length}"
        )

    starts = list(range(0, length - config.window_length + 1, config.hop))

    rows = parallel_map(
        lambda start: _window_coefficients(series, start, config),
        starts,
        threads=threads,
    )

    logger.info(
        "Estimated coefficients for {} windows of {} samples ({} degenerate)",
        len(rows),
        config.window_length,
        sum(x.degenerate for x in rows),
    )

    return CoefficientTrack(
        window_length=config.window_length,
        hop=config.hop,
        series_length=length,
        rows=rows,
    )


def robust_standardize(values: np.ndarray) -> np.ndarray:
    """
    Center each column on its median and divide by its robust scale
    (1.4826 times the median absolute deviation), falling back to the
    standard deviation. Constant columns become zero.
    """

    values = np.asarray(values, dtype=np.float64)
    median = np.median(values, axis=0)
    scale = MAD_TO_SIGMA * np.median(np.abs(values - median), axis=0)
    scale = np.where(scale > 0.0, scale, np.std(values, axis=0))

    return np.divide(
        values - median, scale, out=np.zeros_like(values), where=scale > 0.0
    )


def cusum_statistic(z: np.ndarray) -> tuple[int, float]:
    """
    The largest norm of the centered partial sums, scaled by sqrt(n), over
    splits leaving at least two rows on each side.

    Returns
    -------
    tuple[int, float]
        The split k (the first k rows form the left side) and the statistic.
    """

    n = z.shape[0]
    partial = np.cumsum(z - z.mean(axis=0), axis=0)
    norms = np.linalg.norm(partial, axis=1) / math.sqrt(n)

    # Row k - 1 closes the left side of split k.
    splits = np.arange(2, n - 1)
    best = splits[np.argmax(norms[splits - 1])]

    return int(best), float(norms[best - 1])


def permutation_threshold(
    z: np.ndarray, permutations: int, rng: np.random.Generator
) -> float:
    null = [cusum_statistic(rng.permutation(z, axis=0))[1] for _ in range(permutations)]
    return float(np.percentile(null, NULL_PERCENTILE))


def effect_size(left: np.ndarray, right: np.ndarray) -> float:
    """
    The largest difference of side medians, over columns, in units of the
    pooled robust scale of the residuals about those medians.
    """

    effects = []

    for column in range(left.shape[1]):
        a, b = left[:, column], right[:, column]
        shift = abs(np.median(a) - np.median(b))
        residuals = np.concatenate([a - np.median(a), b - np.median(b)])
        scale = MAD_TO_SIGMA * np.median(np.abs(residuals))

        if scale == 0.0:
            scale = float(np.std(residuals))

        if scale == 0.0:
            effects.append(0.0 if shift == 0.0 else math.inf)
        else:
            effects.append(shift / scale)

    return float(max(effects))


def detect_changes(
    tracks: CoefficientTrack,
    min_separation: int | None = None,
    threshold_multiplier: float = 1.0,
    permutations: int = 199,
    seed: int = 0,
    min_effect: float = 5.0,
) -> SegmentationResult:
    """
    Change points of the (A, B) track by binary segmentation.

    Parameters
    ----------
    tracks: CoefficientTrack
        Window coefficients; degenerate windows are left out.
    min_separation: int, optional
        Minimum distance, in samples, between reported change points.
        Defaults to the window length.
    threshold_multiplier: float
        Scales the permutation-null 95th percentile a statistic must exceed.
    permutations: int
        Size of the permutation null of each segment.
    seed: int
        Seed of the permutation nulls.
    min_effect: float
        Minimum difference of segment medians, in pooled robust-scale units.

    Raises
    ------
    TooFewWindows
        If fewer than four windows are usable.
    """

    if min_separation is None:
        min_separation = tracks.window_length

    usable = tracks.usable

    if len(usable) < MINIMUM_WINDOWS:
        raise TooFewWindows(
            f"Change detection needs {MINIMUM_WINDOWS} usable windows, got {len(usable)}"
        )

    starts = np.array([x.start for x in usable])
    z = robust_standardize(np.array([[x.A, x.B] for x in usable]))

    candidates: list[DetectorStat] = []
    pending = [(0, len(usable))]

    while pending:
        low, high = pending.pop()

        if high - low < MINIMUM_WINDOWS:
            continue

        segment = z[low:high]
        split, statistic = cusum_statistic(segment)

        rng = np.random.default_rng(np.random.SeedSequence([seed, low, high]))
        threshold = threshold_multiplier * permutation_threshold(segment, permutations, rng)
        effect = effect_size(segment[:split], segment[split:])

        accepted = statistic > threshold and effect >= min_effect
        boundary = low + split

        index = int(
            round((starts[boundary - 1] + starts[boundary]) / 2 + tracks.window_length / 2)
        )

        candidates.append(
            DetectorStat(
                index=index,
                split_after_start=int(starts[boundary - 1]),
                statistic=statistic,
                threshold=threshold,
                effect=effect,
                accepted=accepted,
            )
        )

        logger.debug(
            "Windows {}..{}: split at sample {}, statistic {} against {}, effect {}",
            low,
            high,
            index,
            statistic,
            threshold,
            effect,
        )

        if accepted:
            pending.append((boundary, high))
            pending.append((low, boundary))

    change_points: list[int] = []

    for candidate in sorted(
        (x for x in candidates if x.accepted), key=lambda x: x.statistic, reverse=True
    ):
        if all(abs(candidate.index - x) >= min_separation for x in change_points):
            change_points.append(candidate.index)

    logger.info(
        "Detected {} change points from {} candidates", len(change_points), len(candidates)
    )

    return SegmentationResult(
        tracks=tracks,
        change_points=sorted(change_points),
        detector_stats=sorted(candidates, key=lambda x: x.index),
    )


def segment(
    series: SampledFunction,
    config: WindowConfig,
    threads: int = 1,
    min_separation: int | None = None,
    threshold_multiplier: float = 1.0,
    seed: int = 0,
    min_effect: float = 5.0,
) -> SegmentationResult:
    """
    Coefficient track and change detection in one call.
    """

    tracks = coefficient_track(series, config, threads=threads)

    return detect_changes(
        tracks,
        min_separation=min_separation,
        threshold_multiplier=threshold_multiplier,
        seed=seed,
        min_effect=min_effect,
    )
