"""
Specification types for epsicomp.

This package provides pydantic models describing every enumerated kind
the library can handle: error norms, approximation methods, moduli of
continuity and synthetic generators.

Each kind must inherit from the BaseSpec type defined here.
Each kind must have a unique `kind` field which is a string used as a
discriminator within its family.
Each kind must be added to the below ALL_* and ALL_*_TYPE definitions.
"""

from typing import Annotated, Union

from pydantic import Field

from epsimeta.generators import (
    Affine,
    FbmMidpoint,
    LogisticMap,
    Polynomial,
    Sine,
    Weierstrass,
)
from epsimeta.methods import CubicSpline, NearestNeighbor, PiecewiseLinear, PolynomialLSQ
from epsimeta.modulus import HolderModulus, TabulatedModulus
from epsimeta.norms import MeanPowerNorm, UniformNorm

ALL_NORM_TYPE = Annotated[
    Union[UniformNorm, MeanPowerNorm],
    Field(discriminator="kind"),
]

ALL_METHOD_TYPE = Annotated[
    Union[NearestNeighbor, PiecewiseLinear, CubicSpline, PolynomialLSQ],
    Field(discriminator="kind"),
]

ALL_MODULUS_TYPE = Annotated[
    Union[HolderModulus, TabulatedModulus],
    Field(discriminator="kind"),
]

ALL_GENERATOR_TYPE = Annotated[
    Union[Affine, Polynomial, Sine, Weierstrass, FbmMidpoint, LogisticMap],
    Field(discriminator="kind"),
]

ALL_NORMS = {x.model_fields["kind"].default: x for x in [UniformNorm, MeanPowerNorm]}

ALL_METHODS = {
    x.model_fields["kind"].default: x
    for x in [NearestNeighbor, PiecewiseLinear, CubicSpline, PolynomialLSQ]
}

ALL_MODULI = {
    x.model_fields["kind"].default: x for x in [HolderModulus, TabulatedModulus]
}

ALL_GENERATORS = {
    x.model_fields["kind"].default: x
    for x in [Affine, Polynomial, Sine, Weierstrass, FbmMidpoint, LogisticMap]
}
