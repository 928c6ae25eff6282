"""
The fixed family of approximation methods used to recover discarded
function values from the retained ones.

Errors are measured over the discarded nodes only, since retained values
are known exactly. Interpolating methods return the retained values
unchanged at retained nodes.
"""

import re

import numpy as np
from loguru import logger
from numpy.polynomial import Polynomial
from pydantic import BaseModel, ConfigDict
from scipy import interpolate

from epsicomp.errors import DataError, NumericFailure
from epsicomp.service.function_model import (
    SampledFunction,
    SubgridSelection,
    error_between,
)
from epsimeta import ALL_METHOD_TYPE, ALL_NORM_TYPE
from epsimeta.methods import CubicSpline, NearestNeighbor, PiecewiseLinear, PolynomialLSQ
from epsimeta.norms import MeanPowerNorm, UniformNorm

DEFAULT_FAMILY = (
    PiecewiseLinear(),
    CubicSpline(),
    PolynomialLSQ(degree=2),
    PolynomialLSQ(degree=5),
    NearestNeighbor(),
)


class TooFewPoints(DataError):
    pass


class UnsupportedDimension(DataError):
    pass


class AllMethodsFailed(NumericFailure):
    def __init__(self, failures: list[str]):
        super().__init__(
            "Every approximation method failed: " + "; ".join(failures)
        )


class ReconstructionResult(BaseModel):
    predicted: np.ndarray
    method: ALL_METHOD_TYPE
    error: float

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


def _reconstruct_line(
    axis: np.ndarray, kept: np.ndarray, values: np.ndarray, method: ALL_METHOD_TYPE
) -> np.ndarray:
    x, y = axis[kept], values[kept]

    match method:
        case NearestNeighbor():
            # Outside the retained range the nearest retained value is the end one
            return interpolate.interp1d(
                x,
                y,
                kind="nearest",
                assume_sorted=True,
                copy=False,
                bounds_error=False,
                fill_value=(y[0], y[-1]),
            )(axis)
        case PiecewiseLinear():
            return np.interp(axis, x, y)
        case CubicSpline():
            # The natural spline through two points is the line between them.
            if x.size == 2:
                return np.interp(axis, x, y)
            return interpolate.CubicSpline(x, y, bc_type="natural")(axis)
        case PolynomialLSQ(degree=degree):
            if degree >= x.size:
                raise TooFewPoints(
                    f"A degree {degree} least-squares fit needs more than "
                    f"{x.size} retained points"
                )
            return Polynomial.fit(x, y, deg=degree)(axis)

    raise TypeError(f"Unknown approximation method {method!r}")


def _reconstruct_plane(
    f: SampledFunction, kept: np.ndarray, method: ALL_METHOD_TYPE
) -> np.ndarray:
    rows, columns = np.unravel_index(kept, f.shape)
    row_nodes, column_nodes = np.unique(rows), np.unique(columns)

    if row_nodes.size * column_nodes.size != kept.size:
        raise UnsupportedDimension(
            "2-d reconstruction needs a tensor-product subgrid of retained nodes"
        )

    if row_nodes.size < 2 or column_nodes.size < 2:
        raise TooFewPoints("2-d reconstruction needs two retained nodes per axis")

    grid = f.values.reshape(f.shape)[np.ix_(row_nodes, column_nodes)]
    axis = f.axis

    interpolator = interpolate.RegularGridInterpolator(
        (axis[row_nodes], axis[column_nodes]),
        grid,
        method="nearest" if isinstance(method, NearestNeighbor) else "linear",
        bounds_error=False,
        fill_value=None,
    )

    mesh = np.meshgrid(axis, axis, indexing="ij")
    points = np.stack([x.ravel() for x in mesh], axis=1)

    return interpolator(points)


def reconstruct(
    f: SampledFunction,
    kept: SubgridSelection,
    method: ALL_METHOD_TYPE,
    norm: ALL_NORM_TYPE = UniformNorm(),
) -> ReconstructionResult:
    """
    Predict the function at every grid node from the retained nodes, and
    measure the error over the discarded nodes.

    Raises
    ------
    TooFewPoints
        Fewer than two retained nodes, or no more than ``degree`` of them
        for a least-squares polynomial.
    UnsupportedDimension
        Splines and polynomials in more than one dimension; any method in
        more than two.
    """

    indices = kept.kept_indices
    discarded = kept.discarded_mask(f.n_total)

    if indices.size < 2:
        raise TooFewPoints("At least two retained nodes are needed")

    if f.dim == 1:
        predicted = _reconstruct_line(f.axis, indices, f.values, method)
    elif f.dim == 2 and isinstance(method, (NearestNeighbor, PiecewiseLinear)):
        predicted = _reconstruct_plane(f, indices, method)
    else:
        raise UnsupportedDimension(
            f"{type(method).__name__} is not available for {f.dim}-d functions"
        )

    predicted = np.asarray(predicted, dtype=np.float64)

    if method.interpolating:
        predicted[indices] = f.values[indices]

    predicted.setflags(write=False)

    return ReconstructionResult(
        predicted=predicted,
        method=method,
        error=error_between(f.values[discarded], predicted[discarded], norm),
    )


def best_reconstruction(
    f: SampledFunction,
    kept: SubgridSelection,
    family: tuple[ALL_METHOD_TYPE, ...] = DEFAULT_FAMILY,
    norm: ALL_NORM_TYPE = UniformNorm(),
) -> ReconstructionResult:
    """
    The reconstruction with the smallest error over the family. Methods
    whose preconditions fail are skipped; ties go to the earlier method.

    Raises
    ------
    AllMethodsFailed
        If no method in the family could reconstruct.
    """

    if len(family) == 0:
        raise ValueError("The approximation family must not be empty")

    best: ReconstructionResult | None = None
    failures = []

    for method in family:
        try:
            result = reconstruct(f, kept, method, norm)
        except (TooFewPoints, UnsupportedDimension, ValueError) as e:
            logger.debug("Skipping {}: {}", method.kind, e)
            failures.append(f"{method.kind}: {e}")
            continue

        if best is None or result.error < best.error:
            best = result

    if best is None:
        raise AllMethodsFailed(failures)

    return best


def parse_method(token: str) -> ALL_METHOD_TYPE:
    """
    A method from its command-line token: ``linear``, ``spline``,
    ``nearest`` or ``polyN`` for a degree-N least-squares polynomial.
    """

    token = token.strip().lower()

    if match := re.fullmatch(r"poly(\d+)", token):
        return PolynomialLSQ(degree=int(match.group(1)))

    methods = {
        "linear": PiecewiseLinear,
        "spline": CubicSpline,
        "nearest": NearestNeighbor,
    }

    if token not in methods:
        raise ValueError(f"Unknown approximation method {token!r}")

    return methods[token]()


def parse_family(tokens) -> tuple[ALL_METHOD_TYPE, ...]:
    if isinstance(tokens, str):
        tokens = tokens.split(",")

    return tuple(parse_method(x) for x in tokens if x.strip())


def parse_norm(token: str) -> ALL_NORM_TYPE:
    """
    A norm from its command-line token: ``uniform``, or ``power:q``.
    """

    token = token.strip().lower()

    if token == "uniform":
        return UniformNorm()

    if match := re.fullmatch(r"power:([0-9.eE+-]+)", token):
        return MeanPowerNorm(q=float(match.group(1)))

    raise ValueError(f"Unknown error norm {token!r}")
