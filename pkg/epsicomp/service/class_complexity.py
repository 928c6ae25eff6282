"""
Exact epsilon-complexity of bounded sets in a modulus-of-continuity class,
measured in the uniform norm.

For a class with modulus omega, sup-norm radius R, on the unit cube in k
dimensions, the minimax reconstruction error on a grid of spacing h is
omega(sqrt(k) h / 2) (attained at the cell centre when all vertex values
are equal), and so

    S_cl(eps) = (1 / R) * ln(sqrt(k) / (2 * omega^-1(eps)))

For Holder moduli omega(h) = L h^p this is affine in ln(eps), with
coefficients given by ``holder_coefficients``.
"""

import itertools
import math

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from epsicomp.errors import DataError, NumericFailure
from epsicomp.service.parallel import parallel_map
from epsimeta import ALL_MODULUS_TYPE
from epsimeta.modulus import HolderModulus, TabulatedModulus


class OutOfRange(DataError):
    pass


class NotAttained(DataError):
    pass


class NotHolder(DataError):
    pass


class ErrorTooLarge(NumericFailure):
    """
    A single cell covering the whole cube already reconstructs within the
    requested error, so the class complexity would be negative.
    """

    pass


class ClassSpec(BaseModel):
    modulus: ALL_MODULUS_TYPE
    radius: float = Field(default=1.0, gt=0.0)
    dim: int = Field(default=1, ge=1)

    model_config = ConfigDict(frozen=True)


class HolderCoefficients(BaseModel):
    """
    S_cl(eps) = A + B ln(eps), natural logarithms.
    """

    A: float
    B: float = Field(lt=0.0)

    model_config = ConfigDict(frozen=True)


def _modulus_values(modulus: ALL_MODULUS_TYPE, h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=np.float64)

    if np.any(h < 0.0):
        raise ValueError("The modulus of continuity is only defined for h >= 0")

    match modulus:
        case HolderModulus(L=L, p=p):
            return L * h**p
        case TabulatedModulus(knots=knots):
            spacings, values = np.array(knots).T
            if np.any(h > spacings[-1]):
                raise OutOfRange(
                    f"Tabulated modulus queried at h={np.max(h)}, beyond the "
                    f"last knot at {spacings[-1]}"
                )
            return np.interp(h, spacings, values)

    raise TypeError(f"Unknown modulus {modulus!r}")


def modulus_eval(modulus: ALL_MODULUS_TYPE, h: float) -> float:
    """
    omega(h). Holder moduli return L h^p, tabulated moduli interpolate
    linearly between knots.

    Raises
    ------
    OutOfRange
        If a tabulated modulus is queried beyond its last knot.
    """
    return float(_modulus_values(modulus, h))


def modulus_inverse(modulus: ALL_MODULUS_TYPE, epsilon: float) -> float:
    """
    The generalized inverse min{h : omega(h) = epsilon}.

    Raises
    ------
    NotAttained
        If epsilon exceeds the largest value of a tabulated modulus.
    """

    if epsilon <= 0.0:
        raise ValueError(f"The inverse is only defined for epsilon > 0, got {epsilon}")

    match modulus:
        case HolderModulus(L=L, p=p):
            return (epsilon / L) ** (1.0 / p)
        case TabulatedModulus(knots=knots):
            spacings, values = np.array(knots).T

            if epsilon > values[-1]:
                raise NotAttained(
                    f"epsilon={epsilon} exceeds the modulus maximum {values[-1]}"
                )

            # First knot reaching epsilon; on a flat segment this is its
            # left end, which is the minimum solution.
            index = int(np.argmax(values >= epsilon))

            if values[index] == epsilon:
                return float(spacings[index])

            h_left, h_right = spacings[index - 1], spacings[index]
            w_left, w_right = values[index - 1], values[index]

            return float(h_left + (epsilon - w_left) * (h_right - h_left) / (w_right - w_left))

    raise TypeError(f"Unknown modulus {modulus!r}")


def minimax_cell_error(modulus: ALL_MODULUS_TYPE, h: float, dim: int) -> float:
    """
    Closed-form minimax reconstruction error omega(sqrt(k) h / 2) on a grid
    of spacing h.
    """
    return modulus_eval(modulus, math.sqrt(dim) * h / 2.0)


def class_grid_spacing(spec: ClassSpec, epsilon: float) -> float:
    """
    The grid spacing h(eps) = 2 omega^-1(eps) / sqrt(k), at which the minimax
    reconstruction error equals epsilon.
    """
    return 2.0 * modulus_inverse(spec.modulus, epsilon) / math.sqrt(spec.dim)


def class_complexity(spec: ClassSpec, epsilon: float) -> float:
    """
    epsilon-complexity of the class,
    (1 / R) ln(sqrt(k) / (2 omega^-1(eps))).

    Raises
    ------
    ErrorTooLarge
        If omega^-1(eps) > sqrt(k) / 2.
    NotAttained
        If epsilon is outside the range of a tabulated modulus.
    """

    inverse = modulus_inverse(spec.modulus, epsilon)
    half_diagonal = math.sqrt(spec.dim) / 2.0

    if inverse > half_diagonal:
        raise ErrorTooLarge(
            f"omega^-1({epsilon}) = {inverse} exceeds sqrt(k)/2 = {half_diagonal}"
        )

    return math.log(half_diagonal / inverse) / spec.radius


def holder_coefficients(spec: ClassSpec) -> HolderCoefficients:
    """
    Coefficients of S_cl(eps) = A + B ln(eps) for a Holder class:
    A = (ln(sqrt(k) / 2) + ln(L) / p) / R, B = -1 / (p R).

    Raises
    ------
    NotHolder
        If the class modulus is not a Holder modulus.
    """

    if not isinstance(spec.modulus, HolderModulus):
        raise NotHolder("Affine coefficients exist only for Holder moduli")

    L, p = spec.modulus.L, spec.modulus.p

    return HolderCoefficients(
        A=(math.log(math.sqrt(spec.dim) / 2.0) + math.log(L) / p) / spec.radius,
        B=-1.0 / (p * spec.radius),
    )


def intersection_segment(
    modulus: ALL_MODULUS_TYPE,
    tau: np.ndarray,
    vertices: np.ndarray,
    vertex_values: np.ndarray,
) -> tuple[float, float] | None:
    """
    The set of values x(tau) compatible with the modulus and the vertex
    values, the intersection of [x(t_i) - omega(r_i), x(t_i) + omega(r_i)]
    with r_i = |tau - t_i| (Euclidean).

    Returns
    -------
    tuple[float, float] | None
        (midpoint, half-length) of the segment, the minimax estimate and its
        error; None if the vertex values are not admissible (empty
        intersection).
    """

    distances = np.linalg.norm(np.atleast_2d(vertices) - np.asarray(tau), axis=1)
    radii = _modulus_values(modulus, distances)
    vertex_values = np.asarray(vertex_values, dtype=np.float64)

    lower = np.max(vertex_values - radii)
    upper = np.min(vertex_values + radii)

    if lower > upper:
        return None

    return float((lower + upper) / 2.0), float((upper - lower) / 2.0)


def cell_vertices(h: float, dim: int) -> np.ndarray:
    """
    The 2^k vertices of the cell [0, h]^k.
    """
    return h * np.array(list(itertools.product((0.0, 1.0), repeat=dim)))


def minimax_cell_error_oracle(
    modulus: ALL_MODULUS_TYPE,
    h: float,
    dim: int,
    resolution: int,
    threads: int = 1,
) -> float:
    """
    Brute-force minimax reconstruction error of one grid cell: the maximum
    over a ``resolution``^k lattice of points tau in [0, h]^k of
    min_i omega(|tau - t_i|), the worst case where every vertex value is
    equal. Converges to omega(sqrt(k) h / 2) as the resolution grows.

    The lattice is partitioned along its first axis, and the slices are
    max-reduced, so the result does not depend on ``threads``.
    """

    if not 0.0 < h <= 1.0:
        raise ValueError(f"The cell size must lie in (0, 1], got {h}")

    if resolution < 2:
        raise ValueError(f"The lattice resolution must be at least 2, got {resolution}")

    vertices = cell_vertices(h, dim)
    axis = np.linspace(0.0, h, resolution)

    rest = np.stack(
        [x.ravel() for x in np.meshgrid(*([axis] * (dim - 1)), indexing="ij")], axis=1
    ) if dim > 1 else np.empty((1, 0))

    def slice_maximum(first: float) -> float:
        tau = np.column_stack([np.full(len(rest), first), rest])
        distances = np.linalg.norm(tau[:, None, :] - vertices[None, :, :], axis=2)
        return float(np.max(np.min(_modulus_values(modulus, distances), axis=1)))

    maxima = parallel_map(slice_maximum, list(axis), threads=threads)

    logger.debug(
        "Oracle scanned {} points of a {}-d cell of size {}", resolution**dim, dim, h
    )

    return max(maxima)


class ClassRow(BaseModel):
    """
    One requested error level of a class report. ``complexity`` is None when
    it is undefined, with the reason in ``condition``.
    """

    epsilon: float
    complexity: float | None = None
    condition: str | None = None
    spacing: float | None = None
    closed_form: float | None = None
    oracle: float | None = None
    discrepancy: float | None = None

    model_config = ConfigDict(frozen=True)


class ClassReport(BaseModel):
    spec: ClassSpec
    coefficients: HolderCoefficients | None = None
    rows: list[ClassRow]

    model_config = ConfigDict(frozen=True)


def default_resolution(dim: int) -> int:
    return {1: 501, 2: 201, 3: 61}.get(dim, 21)


def class_report(
    spec: ClassSpec,
    epsilons: list[float],
    oracle_resolution: int | None = None,
    threads: int = 1,
) -> ClassReport:
    """
    Class complexity at each error level, with the Holder coefficients when
    they exist. With an oracle resolution, each row also carries the
    closed-form and brute-force minimax errors at the grid spacing h(eps).
    Undefined complexities are marked on their row.
    """

    rows = []

    for epsilon in epsilons:
        try:
            complexity = class_complexity(spec, epsilon)
        except (ErrorTooLarge, NotAttained) as e:
            logger.info("No class complexity at eps={}: {}", epsilon, e)
            rows.append(
                ClassRow(epsilon=epsilon, condition=f"{type(e).__name__}: {e}")
            )
            continue

        if oracle_resolution is None:
            rows.append(ClassRow(epsilon=epsilon, complexity=complexity))
            continue

        spacing = class_grid_spacing(spec, epsilon)
        closed_form = minimax_cell_error(spec.modulus, spacing, spec.dim)
        oracle = minimax_cell_error_oracle(
            spec.modulus, spacing, spec.dim, oracle_resolution, threads=threads
        )

        rows.append(
            ClassRow(
                epsilon=epsilon,
                complexity=complexity,
                spacing=spacing,
                closed_form=closed_form,
                oracle=oracle,
                discrepancy=abs(oracle - closed_form),
            )
        )

    coefficients = (
        holder_coefficients(spec) if isinstance(spec.modulus, HolderModulus) else None
    )

    return ClassReport(spec=spec, coefficients=coefficients, rows=rows)
