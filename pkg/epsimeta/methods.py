"""
The fixed family of approximation methods used to recover discarded
values from retained ones.
"""

from typing import Literal

from pydantic import Field

from epsimeta.base import BaseSpec


class NearestNeighbor(BaseSpec):
    kind: Literal["nearest"] = "nearest"

    interpolating: Literal[True] = True


class PiecewiseLinear(BaseSpec):
    """
    Linear interpolation between retained nodes (multilinear in 2-d).
    """

    kind: Literal["linear"] = "linear"

    interpolating: Literal[True] = True


class CubicSpline(BaseSpec):
    """
    Cubic spline with natural boundary conditions (second derivative
    zero at both ends), so no derivative data is needed.
    """

    kind: Literal["spline"] = "spline"

    interpolating: Literal[True] = True


class PolynomialLSQ(BaseSpec):
    """
    Least-squares polynomial of a fixed degree through the retained nodes.
    Not interpolating.
    """

    kind: Literal["poly"] = "poly"

    degree: int = Field(ge=1)
    interpolating: Literal[False] = False
