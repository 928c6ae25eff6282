"""
Estimation of the complexity coefficients of an individual function.

For each retained fraction S a number of randomized selection schemes keep
about S * N of the samples, the discarded values are reconstructed with the
best method of the family, and the minimal errors are averaged over the
schemes. Within a fit interval of fractions the averaged error follows

    ln(eps) = A + B ln(S)

and the pair (A, B) characterizes the function. The same procedure applied
to the forward-difference series of each order gives a coefficient profile.
"""

import math
from typing import Literal

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import stats

from epsicomp.errors import DataError, EpsicompError, NumericFailure
from epsicomp.service.approximation import (
    DEFAULT_FAMILY,
    AllMethodsFailed,
    UnsupportedDimension,
    best_reconstruction,
)
from epsicomp.service.function_model import (
    SampledFunction,
    SubgridSelection,
    normalize,
    require_normalized,
)
from epsicomp.service.parallel import parallel_map
from epsimeta import ALL_METHOD_TYPE, ALL_NORM_TYPE
from epsimeta.norms import UniformNorm

DEFAULT_FRACTIONS = tuple(round(0.05 * x, 2) for x in range(1, 20))
DEFAULT_FIT_INTERVAL = (0.2, 0.8)
DEGENERACY_FLOOR = 1e-12
FRACTION_TOLERANCE = 1e-9


class TooFewKept(DataError):
    pass


class TooFewRows(DataError):
    pass


class OrderTooHigh(DataError):
    pass


class DegenerateFit(NumericFailure):
    """
    The averaged errors are (effectively) zero, so the function is recovered
    exactly and has no complexity coefficients.
    """

    pass


def _in_interval(fraction: float, interval: tuple[float, float]) -> bool:
    return (
        interval[0] - FRACTION_TOLERANCE <= fraction <= interval[1] + FRACTION_TOLERANCE
    )


class SweepConfig(BaseModel):
    fractions: tuple[float, ...] = DEFAULT_FRACTIONS
    fit_interval: tuple[float, float] = DEFAULT_FIT_INTERVAL
    schemes_per_fraction: int = Field(default=10, ge=1)
    rng_seed: int = Field(default=0, ge=0)
    family: tuple[ALL_METHOD_TYPE, ...] = DEFAULT_FAMILY
    norm: ALL_NORM_TYPE = UniformNorm()
    difference_orders: int = Field(default=0, ge=0)
    selection: Literal["stratified", "uniform"] = "stratified"
    nested: bool = False
    "Use nested selections, where the kept set at a larger fraction contains the smaller ones."
    degeneracy_floor: float = Field(default=DEGENERACY_FLOOR, gt=0.0)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_sweep(self) -> "SweepConfig":
        fractions = np.array(self.fractions)

        if fractions.size == 0:
            raise ValueError("At least one retained fraction is required")

        if np.any(fractions <= 0.0) or np.any(fractions >= 1.0):
            raise ValueError("Retained fractions must lie in (0, 1)")

        if np.any(np.diff(fractions) <= 0.0):
            raise ValueError("Retained fractions must be strictly increasing")

        alpha, beta = self.fit_interval

        if not 0.0 < alpha <= beta < 1.0:
            raise ValueError(
                f"The fit interval must satisfy 0 < a <= b < 1, got {self.fit_interval}"
            )

        if sum(_in_interval(x, self.fit_interval) for x in self.fractions) < 3:
            raise ValueError(
                f"The fit interval {self.fit_interval} must contain at least three fractions"
            )

        if len(self.family) == 0:
            raise ValueError("The approximation family must not be empty")

        return self


class CurveRow(BaseModel):
    fraction: float
    mean_error: float = Field(ge=0.0)
    stddev: float = Field(ge=0.0)
    n_schemes: int
    "Schemes that produced an error; schemes where every method failed are skipped."

    model_config = ConfigDict(frozen=True)


class RecoveryErrorCurve(BaseModel):
    rows: list[CurveRow]

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_order(self) -> "RecoveryErrorCurve":
        if any(b.fraction <= a.fraction for a, b in zip(self.rows[:-1], self.rows[1:])):
            raise ValueError("Curve rows must be ordered by increasing fraction")

        return self

    @property
    def fractions(self) -> np.ndarray:
        return np.array([x.fraction for x in self.rows])

    @property
    def mean_errors(self) -> np.ndarray:
        return np.array([x.mean_error for x in self.rows])


class ComplexityCoefficients(BaseModel):
    """
    ln(eps) = A + B ln(S) over the rows of the fit interval. Degenerate
    fits (exactly recoverable functions) carry A = B = 0.
    """

    A: float
    B: float
    r_squared: float = Field(ge=0.0, le=1.0)
    n_points_fit: int
    interval_used: tuple[float, float]
    degenerate: bool = False
    slope_stderr: float | None = None
    stable: bool = True
    "Whether leaving out any one row moves B by less than three standard errors."
    reason: str | None = None
    log_base: Literal["natural"] = "natural"
    normalization: Literal["uniform"] = "uniform"

    model_config = ConfigDict(frozen=True)

    @classmethod
    def degenerate_fit(
        cls, interval: tuple[float, float], n_points_fit: int = 0, reason: str | None = None
    ) -> "ComplexityCoefficients":
        return cls(
            A=0.0,
            B=0.0,
            r_squared=0.0,
            n_points_fit=n_points_fit,
            interval_used=interval,
            degenerate=True,
            reason=reason,
        )


class ProfileEntry(BaseModel):
    order: int
    coefficients: ComplexityCoefficients

    model_config = ConfigDict(frozen=True)


class CoefficientProfile(BaseModel):
    entries: list[ProfileEntry]

    model_config = ConfigDict(frozen=True)


def _kept_count(n_total: int, fraction: float) -> int:
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"The retained fraction must lie in (0, 1), got {fraction}")

    count = math.floor(fraction * n_total + FRACTION_TOLERANCE)

    if count < 2:
        raise TooFewKept(
            f"Keeping {fraction} of {n_total} samples leaves {count}, at least 2 are needed"
        )

    return count


def stratified_selection(n_total: int, fraction: float, seed: int) -> SubgridSelection:
    """
    Split the indices into floor(fraction * n_total) contiguous blocks and
    keep one uniformly chosen index per block. The first and last blocks
    keep the boundary indices.

    The block boundaries are drawn at random for every scheme, so block
    sizes vary between schemes and not only with the fraction.

    Raises
    ------
    TooFewKept
        If fewer than two indices would be kept.
    """

    count = _kept_count(n_total, fraction)
    rng = np.random.default_rng(seed)

    cuts = np.sort(rng.choice(np.arange(1, n_total), size=count - 1, replace=False))
    starts = np.concatenate([[0], cuts])
    ends = np.concatenate([cuts, [n_total]])

    kept = rng.integers(starts, ends)

    kept[0] = 0
    kept[-1] = n_total - 1

    return SubgridSelection(kept_indices=kept, scheme_id=seed)



def uniform_selection(n_total: int, fraction: float, seed: int) -> SubgridSelection:
    """
    Keep both boundary indices and a uniformly random set of interior ones,
    floor(fraction * n_total) in total.
    """

    count = _kept_count(n_total, fraction)
    rng = np.random.default_rng(seed)

    interior = rng.choice(np.arange(1, n_total - 1), size=count - 2, replace=False)
    kept = np.sort(np.concatenate([[0, n_total - 1], interior]))

    return SubgridSelection(kept_indices=kept, scheme_id=seed)


def nested_selection(n_total: int, fraction: float, seed: int) -> SubgridSelection:
    """
    Keep both boundary indices and the interior indices of highest random
    priority. The priorities depend on the seed only, so for a fixed seed
    the kept set grows with the fraction.
    """

    count = _kept_count(n_total, fraction)
    order = np.random.default_rng(seed).permutation(np.arange(1, n_total - 1))
    kept = np.sort(np.concatenate([[0, n_total - 1], order[: count - 2]]))

    return SubgridSelection(kept_indices=kept, scheme_id=seed)


def scheme_seed(rng_seed: int, fraction_index: int, scheme_index: int) -> int:
    """
    Seed of one selection scheme, derived from the run seed and the position
    of the scheme in the sweep, so it does not depend on execution order.
    """
    return int(
        np.random.SeedSequence([rng_seed, fraction_index, scheme_index]).generate_state(1)[0]
    )


def select(
    n_total: int,
    fraction: float,
    fraction_index: int,
    scheme_index: int,
    config: SweepConfig,
) -> SubgridSelection:
    if config.nested:
        # Nested schemes share their priorities across fractions.
        seed = int(
            np.random.SeedSequence([config.rng_seed, scheme_index]).generate_state(1)[0]
        )
        return nested_selection(n_total, fraction, seed)

    seed = scheme_seed(config.rng_seed, fraction_index, scheme_index)

    match config.selection:
        case "uniform":
            return uniform_selection(n_total, fraction, seed)
        case _:
            return stratified_selection(n_total, fraction, seed)


def _scheme_error(
    f: SampledFunction,
    fraction: float,
    fraction_index: int,
    scheme_index: int,
    config: SweepConfig,
) -> float | None:
    kept = select(f.n_total, fraction, fraction_index, scheme_index, config)

    try:
        return best_reconstruction(f, kept, config.family, config.norm).error
    except AllMethodsFailed as e:
        logger.debug("Scheme {} at fraction {} failed: {}", scheme_index, fraction, e)
        return None


def _summarize(fraction: float, errors: list[float | None]) -> CurveRow:
    succeeded = np.array([x for x in errors if x is not None])

    if succeeded.size == 0:
        raise AllMethodsFailed([f"every selection scheme at fraction {fraction}"])

    return CurveRow(
        fraction=fraction,
        mean_error=float(np.mean(succeeded)),
        stddev=float(np.std(succeeded)),
        n_schemes=int(succeeded.size),
    )


def _require_series(f: SampledFunction):
    require_normalized(f)

    if f.dim != 1:
        raise UnsupportedDimension("Coefficient estimation is only available for 1-d functions")


def error_at_fraction(
    f: SampledFunction,
    fraction: float,
    config: SweepConfig = SweepConfig(),
    fraction_index: int = 0,
    threads: int = 1,
) -> CurveRow:
    """
    Mean and (population) standard deviation of the minimal reconstruction
    error over ``config.schemes_per_fraction`` selection schemes.

    Raises
    ------
    AllMethodsFailed
        If every scheme failed to reconstruct.
    """

    _require_series(f)

    errors = parallel_map(
        lambda scheme: _scheme_error(f, fraction, fraction_index, scheme, config),
        list(range(config.schemes_per_fraction)),
        threads=threads,
    )

    return _summarize(fraction, errors)


def error_curve(
    f: SampledFunction, config: SweepConfig = SweepConfig(), threads: int = 1
) -> RecoveryErrorCurve:
    """
    The averaged recovery error at every fraction of the sweep. The
    (fraction, scheme) grid is evaluated in parallel and assembled in
    order, so the curve does not depend on ``threads``.
    """

    _require_series(f)

    schemes = config.schemes_per_fraction
    grid = [
        (fraction_index, scheme)
        for fraction_index in range(len(config.fractions))
        for scheme in range(schemes)
    ]

    errors = parallel_map(
        lambda item: _scheme_error(
            f, config.fractions[item[0]], item[0], item[1], config
        ),
        grid,
        threads=threads,
    )

    rows = [
        _summarize(fraction, errors[index * schemes : (index + 1) * schemes])
        for index, fraction in enumerate(config.fractions)
    ]

    logger.info(
        "Swept {} fractions with {} schemes each over {} samples",
        len(rows),
        schemes,
        f.n_total,
    )

    return RecoveryErrorCurve(rows=rows)


def _usable_rows(
    curve: RecoveryErrorCurve, interval: tuple[float, float], floor: float
) -> tuple[np.ndarray, np.ndarray, int]:
    in_interval = [x for x in curve.rows if _in_interval(x.fraction, interval)]

    if len(in_interval) < 3:
        raise TooFewRows(
            f"The fit interval {interval} holds {len(in_interval)} rows, at least 3 are needed"
        )

    usable = [x for x in in_interval if x.mean_error >= floor]

    return (
        np.log([x.fraction for x in usable]),
        np.log([x.mean_error for x in usable]),
        len(in_interval),
    )


def leave_one_out_slopes(
    curve: RecoveryErrorCurve,
    interval: tuple[float, float] = DEFAULT_FIT_INTERVAL,
    floor: float = DEGENERACY_FLOOR,
) -> np.ndarray:
    """
    The fitted slope with each usable row of the interval left out in turn.
    Empty when fewer than four rows are usable.
    """

    x, y, _ = _usable_rows(curve, interval, floor)

    if x.size < 4:
        return np.array([])

    mask = np.ones(x.size, dtype=bool)
    slopes = []

    for index in range(x.size):
        mask[index] = False
        slopes.append(stats.linregress(x[mask], y[mask]).slope)
        mask[index] = True

    return np.array(slopes)


def fit_complexity(
    curve: RecoveryErrorCurve,
    interval: tuple[float, float] = DEFAULT_FIT_INTERVAL,
    floor: float = DEGENERACY_FLOOR,
    raise_on_degenerate: bool = False,
) -> ComplexityCoefficients:
    """
    Ordinary least squares of ln(mean error) on ln(fraction) over the rows
    inside ``interval``. Rows with a mean error below ``floor`` are left
    out; when fewer than three remain, the fit is degenerate.

    Raises
    ------
    TooFewRows
        If the interval holds fewer than three rows.
    DegenerateFit
        If the fit is degenerate and ``raise_on_degenerate`` is set.
    """

    x, y, _ = _usable_rows(curve, interval, floor)

    if x.size < 3:
        reason = f"only {x.size} rows in {interval} have a mean error above {floor}"

        if raise_on_degenerate:
            raise DegenerateFit(reason)

        logger.info("Degenerate fit: {}", reason)

        return ComplexityCoefficients.degenerate_fit(interval, int(x.size), reason)

    result = stats.linregress(x, y)

    slopes = leave_one_out_slopes(curve, interval, floor)
    stable = bool(
        np.all(np.abs(slopes - result.slope) <= 3.0 * result.stderr + FRACTION_TOLERANCE)
    )

    if not stable:
        logger.warning(
            "Leaving out one row moves the slope B={} by up to {}, "
            "beyond 3 standard errors ({})",
            result.slope,
            float(np.max(np.abs(slopes - result.slope))),
            3.0 * result.stderr,
        )

    return ComplexityCoefficients(
        A=float(result.intercept),
        B=float(result.slope),
        r_squared=float(np.clip(result.rvalue**2, 0.0, 1.0)),
        n_points_fit=int(x.size),
        interval_used=interval,
        slope_stderr=float(result.stderr),
        stable=stable,
    )


def estimate(
    f: SampledFunction, config: SweepConfig = SweepConfig(), threads: int = 1
) -> tuple[RecoveryErrorCurve, ComplexityCoefficients]:
    """
    Normalize (when needed), sweep and fit.
    """

    if not f.normalized:
        f = normalize(f)

    curve = error_curve(f, config, threads=threads)
    coefficients = fit_complexity(curve, config.fit_interval, config.degeneracy_floor)

    logger.info(
        "Estimated A={} B={} (r^2={}, degenerate={})",
        coefficients.A,
        coefficients.B,
        coefficients.r_squared,
        coefficients.degenerate,
    )

    return curve, coefficients


def forward_differences(values: np.ndarray, order: int) -> np.ndarray:
    return np.diff(np.asarray(values, dtype=np.float64), n=order)


def difference_series(f: SampledFunction, order: int) -> SampledFunction:
    """
    The forward differences of order ``order`` (N - order values),
    renormalized. Order 0 returns ``f`` unchanged.

    Raises
    ------
    OrderTooHigh
        If fewer than two values would remain.
    ZeroFunction
        If the differences are identically zero.
    """

    if order < 0:
        raise ValueError(f"The difference order must be nonnegative, got {order}")

    if f.dim != 1:
        raise UnsupportedDimension("Difference series are only defined for 1-d functions")

    if order == 0:
        return f

    if f.n_total - order < 2:
        raise OrderTooHigh(
            f"Differences of order {order} leave {f.n_total - order} of {f.n_total} values"
        )

    return normalize(SampledFunction.from_series(forward_differences(f.values, order)))


def coefficient_profile(
    f: SampledFunction, config: SweepConfig = SweepConfig(), threads: int = 1
) -> list[ProfileEntry]:
    """
    Complexity coefficients of ``f`` and of its difference series up to
    ``config.difference_orders``. An order that cannot be estimated is
    reported as degenerate and does not stop the others.
    """

    entries = []

    for order in range(config.difference_orders + 1):
        try:
            series = difference_series(f, order)
            _, coefficients = estimate(series, config, threads=threads)
        except EpsicompError as e:
            logger.warning("Difference order {} is degenerate: {}", order, e)
            coefficients = ComplexityCoefficients.degenerate_fit(
                config.fit_interval, reason=str(e)
            )

        entries.append(ProfileEntry(order=order, coefficients=coefficients))

    return entries
