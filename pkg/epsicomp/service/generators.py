"""
Synthetic test functions with known regularity, sampled on the uniform
1-d grid over [0, 1].
"""

import math

import numpy as np
from loguru import logger
from pydantic import ValidationError

from epsicomp.errors import DataError
from epsicomp.service.function_model import SampledFunction
from epsimeta import ALL_GENERATOR_TYPE, ALL_GENERATORS
from epsimeta.generators import (
    Affine,
    FbmMidpoint,
    LogisticMap,
    Polynomial,
    Sine,
    Weierstrass,
)


class InvalidSpec(DataError):
    pass


def build_spec(kind: str, **parameters) -> ALL_GENERATOR_TYPE:
    """
    Validate a generator specification from its kind and parameters.
    Parameters that are None are left at their defaults.

    Raises
    ------
    InvalidSpec
        If the kind is unknown or the parameters break its invariants.
    """

    if kind not in ALL_GENERATORS:
        raise InvalidSpec(
            f"Unknown generator {kind!r}, expected one of {', '.join(ALL_GENERATORS)}"
        )

    model = ALL_GENERATORS[kind]
    parameters = {
        key: value
        for key, value in parameters.items()
        if value is not None and key in model.model_fields
    }

    try:
        return model(**parameters)
    except ValidationError as e:
        raise InvalidSpec(str(e))


def _weierstrass(spec: Weierstrass) -> np.ndarray:
    # cos(b^n pi i / (N - 1)) only depends on b^n i modulo 2 (N - 1), which
    # is computed exactly in integers. This keeps high-order terms accurate
    # where b^n pi t would lose every significant digit.
    period = 2 * (spec.n_points - 1)
    nodes = np.arange(spec.n_points, dtype=np.int64)
    values = np.zeros(spec.n_points)

    for n in range(spec.terms):
        phase = (pow(spec.b, n, period) * nodes) % period
        values += spec.a**n * np.cos(np.pi * phase / (spec.n_points - 1))

    return values


def _fbm_midpoint(spec: FbmMidpoint) -> np.ndarray:
    levels = max(1, math.ceil(math.log2(spec.n_points - 1)))
    size = 2**levels
    rng = np.random.default_rng(spec.seed)

    path = np.zeros(size + 1)
    path[-1] = rng.normal()

    # Displacement variance at each level is (1 - 2^(2H - 2)) 2^(-2 H level).
    scale = math.sqrt(1.0 - 2.0 ** (2.0 * spec.hurst - 2.0))

    for level in range(1, levels + 1):
        step = size // 2**level
        midpoints = np.arange(step, size, 2 * step)
        displacement = scale * 2.0 ** (-spec.hurst * level)
        path[midpoints] = (
            0.5 * (path[midpoints - step] + path[midpoints + step])
            + displacement * rng.normal(size=midpoints.size)
        )

    if size == spec.n_points - 1:
        return path

    return np.interp(np.linspace(0.0, 1.0, spec.n_points), np.linspace(0.0, 1.0, size + 1), path)


def _logistic(spec: LogisticMap) -> np.ndarray:
    values = np.empty(spec.n_points)
    x = spec.x0

    for index in range(spec.n_points):
        values[index] = x
        x = spec.r * x * (1.0 - x)

    return values


def generate(spec: ALL_GENERATOR_TYPE) -> SampledFunction:
    """
    Sample the specified function on ``spec.n_points`` uniform nodes in
    [0, 1]. Deterministic given the specification, seeds included.
    """

    t = np.linspace(0.0, 1.0, spec.n_points)

    match spec:
        case Affine(a=a, b=b):
            values = a * t + b
        case Polynomial(coeffs=coeffs):
            values = np.polynomial.polynomial.polyval(t, coeffs)
        case Sine(freq=freq, phase=phase):
            values = np.sin(2.0 * np.pi * freq * t + phase)
        case Weierstrass():
            values = _weierstrass(spec)
        case FbmMidpoint():
            values = _fbm_midpoint(spec)
        case LogisticMap():
            values = _logistic(spec)
        case _:
            raise InvalidSpec(f"Unknown generator {spec!r}")

    logger.debug("Generated {} samples of {}", spec.n_points, spec.kind)

    return SampledFunction.from_series(values)


def nominal_holder_exponent(spec: ALL_GENERATOR_TYPE) -> float | None:
    """
    The analytically known Holder exponent of the generated function, if any:
    ln(1/a) / ln(b) for Weierstrass, H for fBm, 1 for smooth functions, and
    None for logistic-map trajectories.
    """

    match spec:
        case Weierstrass(a=a, b=b):
            return math.log(1.0 / a) / math.log(b)
        case FbmMidpoint(hurst=hurst):
            return hurst
        case Affine() | Polynomial() | Sine():
            return 1.0

    return None


def holder_ratio_scan(
    f: SampledFunction, p: float, lags: np.ndarray | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """
    max_t |x(t + h) - x(t)| / h^p at each lag (in grid steps), with
    h = lag / (N - 1). Every lag from 1 to N - 1 is scanned by default.

    Returns
    -------
    tuple[np.ndarray, np.ndarray]
        The spacings h and the corresponding ratios.
    """

    if f.dim != 1:
        raise ValueError("The Holder scan is only defined for 1-d functions")

    if lags is None:
        lags = np.arange(1, f.points_per_axis)

    lags = np.asarray(lags, dtype=np.int64)
    values = f.values

    increments = np.array([np.max(np.abs(values[lag:] - values[:-lag])) for lag in lags])
    spacings = lags * f.spacing

    return spacings, increments / spacings**p


def empirical_holder_constant(f: SampledFunction, p: float) -> float:
    """
    The smallest L with |x(t) - x(s)| <= L |t - s|^p over all grid pairs.
    """
    return float(np.max(holder_ratio_scan(f, p)[1]))
