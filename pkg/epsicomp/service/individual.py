"""
Individual epsilon-complexity of a sampled function.

The reconstruction error delta(h) is tabulated at every spacing realizable
by a stride of the sampling grid. From it,

    h*(eps) = min{h : delta(h) > eps}, or 1 if no such h,
    S(eps)  = ln(1 / h*(eps)),
    S_N(eps) = ln(N^k / floor(h*(eps) N)^k),

the last being the complexity computed from N^k discrete values, which
tends to S(eps) as N grows.
"""

import math

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator

from epsicomp.errors import NumericFailure
from epsicomp.service.approximation import DEFAULT_FAMILY, best_reconstruction
from epsicomp.service.function_model import (
    SampledFunction,
    normalize,
    require_normalized,
    uniform_subgrid,
)
from epsicomp.service.generators import generate
from epsicomp.service.parallel import parallel_map
from epsimeta import ALL_GENERATOR_TYPE, ALL_METHOD_TYPE, ALL_NORM_TYPE
from epsimeta.norms import UniformNorm

COARSE_GRID_WARNING = 10
ROUNDING_FLOOR = 1e-12


class DiscreteUndefined(NumericFailure):
    pass


class DeltaCurve(BaseModel):
    """
    delta(h) at every realizable spacing. ``deltas`` are monotone-enforced
    (running maximum of ``raw_deltas``), and ``raw_violation`` records
    whether the raw values decreased anywhere.
    """

    spacings: np.ndarray
    deltas: np.ndarray
    raw_deltas: np.ndarray
    monotone_enforced: bool = True
    raw_violation: bool = False

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def check_curve(self) -> "DeltaCurve":
        if self.spacings.size == 0:
            raise ValueError("A delta curve needs at least one point")

        if not (self.spacings.size == self.deltas.size == self.raw_deltas.size):
            raise ValueError("Spacings and errors must have the same length")

        if np.any(np.diff(self.spacings) <= 0.0):
            raise ValueError("Spacings must be strictly increasing")

        if self.monotone_enforced and np.any(np.diff(self.deltas) < 0.0):
            raise ValueError("Enforced errors must be nondecreasing")

        return self

    @classmethod
    def from_raw(cls, spacings, raw_deltas) -> "DeltaCurve":
        spacings = np.asarray(spacings, dtype=np.float64)
        raw_deltas = np.asarray(raw_deltas, dtype=np.float64)

        return cls(
            spacings=spacings,
            deltas=np.maximum.accumulate(raw_deltas),
            raw_deltas=raw_deltas,
            raw_violation=bool(np.any(np.diff(raw_deltas) < 0.0)),
        )


class ComplexityValue(BaseModel):
    epsilon: float = Field(ge=0.0)
    h_star: float = Field(gt=0.0, le=1.0)
    s: float = Field(ge=0.0)
    s_n: float = Field(ge=0.0)
    n_points: int
    dim: int
    coarse: bool = False
    "True when floor(h* N) is below the coarse-grid warning threshold."

    model_config = ConfigDict(frozen=True)


class ConvergenceRow(BaseModel):
    n_points: int
    s_n: float
    gap: float

    model_config = ConfigDict(frozen=True)


def delta_curve(
    f: SampledFunction,
    family: tuple[ALL_METHOD_TYPE, ...] = DEFAULT_FAMILY,
    norm: ALL_NORM_TYPE = UniformNorm(),
    threads: int = 1,
) -> DeltaCurve:
    """
    delta(h) = best reconstruction error from the uniform subgrid of stride
    m, for every stride m from 1 to N - 1, at h = m / (N - 1). Errors at
    rounding level are recorded as zero.
    """

    require_normalized(f)

    if f.points_per_axis < 3:
        raise ValueError("A delta curve needs at least three nodes per axis")

    strides = list(range(1, f.points_per_axis))

    def stride_error(stride: int) -> float:
        return best_reconstruction(f, uniform_subgrid(f, stride), family, norm).error

    raw = np.array(parallel_map(stride_error, strides, threads=threads))
    raw[raw <= ROUNDING_FLOOR] = 0.0

    curve = DeltaCurve.from_raw(np.array(strides) / (f.points_per_axis - 1), raw)

    if curve.raw_violation:
        logger.warning(
            "Raw reconstruction errors are not monotone in h for N={}, "
            "using their running maximum",
            f.points_per_axis,
        )

    return curve


def h_star(curve: DeltaCurve, epsilon: float) -> float:
    """
    The smallest tabulated spacing whose error exceeds epsilon, or 1 if
    none does.
    """

    if epsilon < 0.0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")

    exceeding = np.flatnonzero(curve.deltas > epsilon)

    if exceeding.size == 0:
        return 1.0

    return float(curve.spacings[exceeding[0]])


def discrete_complexity(value: float, points_per_axis: int, dim: int) -> tuple[float, bool]:
    """
    S_N = ln(N^k / floor(h* N)^k), and whether floor(h* N) is coarse.

    Raises
    ------
    DiscreteUndefined
        If floor(h* N) is zero.
    """

    cells = math.floor(value * points_per_axis)

    if cells == 0:
        raise DiscreteUndefined(
            f"h*={value} is below one grid step of a {points_per_axis}-node grid"
        )

    coarse = cells < COARSE_GRID_WARNING

    if coarse:
        logger.warning(
            "floor(h* N) = {} is small, S_N is a rough estimate of S", cells
        )

    return dim * math.log(points_per_axis / cells), coarse


def complexity_from_curve(
    curve: DeltaCurve, epsilon: float, points_per_axis: int, dim: int
) -> ComplexityValue:
    value = h_star(curve, epsilon)
    s_n, coarse = discrete_complexity(value, points_per_axis, dim)

    return ComplexityValue(
        epsilon=epsilon,
        h_star=value,
        s=math.log(1.0 / value),
        s_n=s_n,
        n_points=points_per_axis,
        dim=dim,
        coarse=coarse,
    )


def complexity_at(
    f: SampledFunction,
    epsilon: float,
    family: tuple[ALL_METHOD_TYPE, ...] = DEFAULT_FAMILY,
    norm: ALL_NORM_TYPE = UniformNorm(),
    threads: int = 1,
) -> ComplexityValue:
    """
    S(eps) and S_N(eps) of a function. Unnormalized functions are
    normalized first.
    """

    if not f.normalized:
        f = normalize(f)

    curve = delta_curve(f, family, norm, threads=threads)

    return complexity_from_curve(curve, epsilon, f.points_per_axis, f.dim)


def convergence_check(
    generator: ALL_GENERATOR_TYPE,
    epsilon: float,
    n_points: list[int],
    family: tuple[ALL_METHOD_TYPE, ...] = DEFAULT_FAMILY,
    norm: ALL_NORM_TYPE = UniformNorm(),
    threads: int = 1,
) -> list[ConvergenceRow]:
    """
    |S_N(eps) - S_ref| for the same function sampled at increasing N,
    where S_ref is S(eps) at the largest N.
    """

    if len(n_points) < 3:
        raise ValueError("A convergence check needs at least three sample sizes")

    if any(b <= a for a, b in zip(n_points[:-1], n_points[1:])):
        raise ValueError("Sample sizes must be strictly increasing")

    values = [
        complexity_at(
            generate(generator.model_copy(update={"n_points": n})),
            epsilon,
            family,
            norm,
            threads=threads,
        )
        for n in n_points
    ]

    reference = values[-1].s

    logger.info(
        "Convergence of S_N({}) over N={}: reference S={}", epsilon, n_points, reference
    )

    return [
        ConvergenceRow(n_points=x.n_points, s_n=x.s_n, gap=abs(x.s_n - reference))
        for x in values
    ]
