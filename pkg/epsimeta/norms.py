"""
Error norms used to measure reconstruction errors.
"""

from typing import Literal

from pydantic import Field

from epsimeta.base import BaseSpec


class UniformNorm(BaseSpec):
    """
    The uniform (maximum absolute difference) norm.
    """

    kind: Literal["uniform"] = "uniform"


class MeanPowerNorm(BaseSpec):
    """
    Discrete L_q-style norm, (mean |a_i - b_i|^q)^(1/q).
    """

    kind: Literal["mean_power"] = "mean_power"

    q: float = Field(ge=1.0)
