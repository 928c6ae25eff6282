"""
Specifications for the synthetic test functions. Every generator samples
its function on the uniform 1-d grid of ``n_points`` nodes spanning [0, 1].
"""

import math
from typing import Any, Literal

from pydantic import Field, field_validator, model_validator

from epsimeta.base import BaseSpec

WEIERSTRASS_TAIL_BOUND = 1e-12


def weierstrass_minimum_terms(a: float) -> int:
    """
    Smallest number of terms whose neglected tail sum_{n >= terms} a^n
    stays below the tail bound, following terms >= log(1e12) / log(1/a).
    """
    return math.ceil(math.log(1.0 / WEIERSTRASS_TAIL_BOUND) / math.log(1.0 / a))


class BaseGenerator(BaseSpec):
    n_points: int = Field(default=1001, ge=2)


class Affine(BaseGenerator):
    """
    x(t) = a * t + b.
    """

    kind: Literal["affine"] = "affine"

    a: float = 1.0
    b: float = 0.0


class Polynomial(BaseGenerator):
    """
    x(t) = sum_i coeffs[i] * t^i (ascending powers).
    """

    kind: Literal["polynomial"] = "polynomial"

    coeffs: tuple[float, ...] = Field(min_length=1)


class Sine(BaseGenerator):
    """
    x(t) = sin(2 pi freq t + phase).
    """

    kind: Literal["sine"] = "sine"

    freq: float = Field(default=1.0, gt=0.0)
    phase: float = 0.0


class Weierstrass(BaseGenerator):
    """
    The classical Weierstrass function sum_n a^n cos(b^n pi t), truncated
    after ``terms`` terms. When ``terms`` is omitted the smallest count
    meeting the tail bound is used.
    """

    kind: Literal["weierstrass"] = "weierstrass"

    a: float = Field(default=0.5, gt=0.0, lt=1.0)
    b: int = Field(default=3, ge=3)
    terms: int = Field(default=40, ge=1)

    @model_validator(mode="before")
    @classmethod
    def default_terms(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("terms") is None:
            data = dict(data)
            a = data.get("a", 0.5)
            # Out-of-range a is left for the field validator to reject.
            valid = isinstance(a, (int, float)) and 0.0 < a < 1.0
            data["terms"] = weierstrass_minimum_terms(a) if valid else 1
        return data

    @field_validator("b")
    @classmethod
    def check_odd(cls, b: int) -> int:
        if b % 2 == 0:
            raise ValueError("b must be an odd integer")
        return b

    @model_validator(mode="after")
    def check_tail(self) -> "Weierstrass":
        required = weierstrass_minimum_terms(self.a)
        if self.terms < required:
            raise ValueError(
                f"a={self.a} needs at least {required} terms to keep the tail "
                f"below {WEIERSTRASS_TAIL_BOUND}"
            )
        return self


class FbmMidpoint(BaseGenerator):
    """
    Approximate fractional Brownian motion by random midpoint displacement.
    """

    kind: Literal["fbm"] = "fbm"

    hurst: float = Field(default=0.5, gt=0.0, lt=1.0)
    seed: int = 0


class LogisticMap(BaseGenerator):
    """
    Trajectory of x -> r x (1 - x), starting at x0.
    """

    kind: Literal["logistic"] = "logistic"

    r: float = Field(default=4.0, gt=0.0, le=4.0)
    x0: float = Field(default=0.2, gt=0.0, lt=1.0)
