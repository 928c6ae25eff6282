"""
Sampled functions on uniform grids over the unit cube, error norms, and
subgrid bookkeeping shared by every other service module.

Grid convention: ``points_per_axis`` (N) nodes per axis spanning [0, 1]
inclusive, so the spacing is 1 / (N - 1). Values are stored flat, in
row-major order over the axes.
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from epsicomp.errors import DataError
from epsimeta import ALL_NORM_TYPE
from epsimeta.norms import MeanPowerNorm, UniformNorm

NORMALIZATION_TOLERANCE = 1e-12


class ZeroFunction(DataError):
    """
    Raised when normalizing a function whose values are all zero.
    """

    def __init__(self):
        super().__init__("All values are zero, the function cannot be normalized")


class LengthMismatch(DataError):
    pass


class StrideTooLarge(DataError):
    pass


class NotNormalized(DataError):
    pass


class SampledFunction(BaseModel):
    """
    Values of a scalar function on the uniform ``dim``-dimensional grid
    with ``points_per_axis`` nodes per axis. The value array is read-only.
    """

    dim: int = Field(ge=1)
    points_per_axis: int = Field(ge=2)
    values: np.ndarray
    normalized: bool = False

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("values", mode="before")
    @classmethod
    def coerce_values(cls, values) -> np.ndarray:
        return np.array(values, dtype=np.float64).ravel()

    @model_validator(mode="after")
    def check_values(self) -> "SampledFunction":
        if self.values.size != self.points_per_axis**self.dim:
            raise ValueError(
                f"Expected {self.points_per_axis}^{self.dim} values, "
                f"got {self.values.size}"
            )

        if not np.all(np.isfinite(self.values)):
            raise ValueError("All values must be finite")

        if self.normalized:
            peak = np.max(np.abs(self.values))
            if abs(peak - 1.0) > NORMALIZATION_TOLERANCE:
                raise ValueError(
                    f"A normalized function must peak at 1 in absolute value, got {peak}"
                )

        self.values.setflags(write=False)

        return self

    @classmethod
    def from_series(cls, values) -> "SampledFunction":
        """
        A 1-d function from a series of values, one per grid node.
        """
        values = np.asarray(values, dtype=np.float64).ravel()
        return cls(dim=1, points_per_axis=values.size, values=values)

    @property
    def spacing(self) -> float:
        return 1.0 / (self.points_per_axis - 1)

    @property
    def n_total(self) -> int:
        return self.values.size

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def axis(self) -> np.ndarray:
        """
        Node coordinates along any one axis.
        """
        return np.linspace(0.0, 1.0, self.points_per_axis)

    @property
    def uniform_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


class SubgridSelection(BaseModel):
    """
    A set of retained grid nodes, by flat index, and the tag of the scheme
    (stride, or derived seed) that selected them.
    """

    kept_indices: np.ndarray
    scheme_id: int = 0

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("kept_indices", mode="before")
    @classmethod
    def coerce_indices(cls, indices) -> np.ndarray:
        return np.array(indices, dtype=np.int64).ravel()

    @model_validator(mode="after")
    def check_indices(self) -> "SubgridSelection":
        if self.kept_indices.size == 0:
            raise ValueError("A selection must keep at least one node")

        if self.kept_indices[0] < 0:
            raise ValueError("Indices must be nonnegative")

        if np.any(np.diff(self.kept_indices) <= 0):
            raise ValueError("Indices must be strictly ascending")

        self.kept_indices.setflags(write=False)

        return self

    def discarded_mask(self, n_total: int) -> np.ndarray:
        """
        Boolean mask over all ``n_total`` nodes, true where a node was discarded.
        """
        if self.kept_indices[-1] >= n_total:
            raise ValueError(
                f"Selection reaches index {self.kept_indices[-1]} of a {n_total}-node grid"
            )

        mask = np.ones(n_total, dtype=bool)
        mask[self.kept_indices] = False
        return mask


def normalize(f: SampledFunction) -> SampledFunction:
    """
    Divide a function by its uniform norm. The uniform norm is used whatever
    norm later measures reconstruction errors.

    Raises
    ------
    ZeroFunction
        If every value is zero.
    """

    peak = f.uniform_norm

    if peak == 0.0:
        raise ZeroFunction

    return SampledFunction(
        dim=f.dim,
        points_per_axis=f.points_per_axis,
        values=f.values / peak,
        normalized=True,
    )


def error_between(a, b, norm: ALL_NORM_TYPE) -> float:
    """
    Distance between two value arrays in the given norm: the maximum
    absolute difference for the uniform norm, (mean |a - b|^q)^(1/q) for
    the mean-power norm. Empty arrays are at distance zero.

    Raises
    ------
    LengthMismatch
        If the arrays have different lengths.
    """

    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()

    if a.size != b.size:
        raise LengthMismatch(f"Cannot compare {a.size} values against {b.size}")

    if a.size == 0:
        return 0.0

    difference = np.abs(a - b)

    match norm:
        case UniformNorm():
            return float(np.max(difference))
        case MeanPowerNorm(q=q):
            return float(np.mean(difference**q) ** (1.0 / q))

    raise TypeError(f"Unknown norm {norm!r}")


def axis_nodes(points_per_axis: int, stride: int) -> np.ndarray:
    """
    Every ``stride``-th node along one axis, always including both ends.
    """

    nodes = np.arange(0, points_per_axis, stride)

    if nodes[-1] != points_per_axis - 1:
        nodes = np.append(nodes, points_per_axis - 1)

    return nodes


def uniform_subgrid(f: SampledFunction, stride: int) -> SubgridSelection:
    """
    Keep every ``stride``-th node along each axis (both boundary nodes of
    each axis are always kept), for an effective spacing stride / (N - 1).

    Raises
    ------
    StrideTooLarge
        If the stride is not smaller than the number of nodes per axis.
    """

    if stride < 1:
        raise ValueError(f"Stride must be positive, got {stride}")

    if stride >= f.points_per_axis:
        raise StrideTooLarge(
            f"Stride {stride} leaves fewer than two nodes on an axis of "
            f"{f.points_per_axis} nodes"
        )

    nodes = axis_nodes(f.points_per_axis, stride)
    mesh = np.meshgrid(*([nodes] * f.dim), indexing="ij")
    flat = np.ravel_multi_index([x.ravel() for x in mesh], f.shape)

    return SubgridSelection(kept_indices=np.sort(flat), scheme_id=stride)


def require_normalized(f: SampledFunction):
    if not f.normalized:
        raise NotNormalized("This operation requires a normalized function")
