"""
Moduli of continuity.
"""

from typing import Literal

from pydantic import Field, field_validator

from epsimeta.base import BaseSpec


class HolderModulus(BaseSpec):
    """
    omega(h) = L * h^p with 0 < p <= 1.
    """

    kind: Literal["holder"] = "holder"

    L: float = Field(gt=0.0)
    p: float = Field(gt=0.0, le=1.0)


class TabulatedModulus(BaseSpec):
    """
    A modulus given by knots (h, omega(h)), interpolated linearly between
    knots. The first knot must be (0, 0); h is strictly increasing and
    omega is nondecreasing, so flat segments are allowed.
    """

    kind: Literal["tabulated"] = "tabulated"

    knots: tuple[tuple[float, float], ...]

    @field_validator("knots")
    @classmethod
    def check_knots(cls, knots):
        if len(knots) < 2:
            raise ValueError("A tabulated modulus needs at least two knots")

        if knots[0] != (0.0, 0.0):
            raise ValueError("The first knot must be (0, 0)")

        for (h_left, w_left), (h_right, w_right) in zip(knots[:-1], knots[1:]):
            if h_right <= h_left:
                raise ValueError("Knot spacings must be strictly increasing")
            if w_right < w_left:
                raise ValueError("Knot values must be nondecreasing")

        if knots[-1][1] <= 0.0:
            raise ValueError("The modulus must not be identically zero")

        return knots
