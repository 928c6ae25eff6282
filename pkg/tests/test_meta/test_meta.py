"""
Tests for the specification types.
"""

import pytest
from pydantic import TypeAdapter, ValidationError

from epsimeta import (
    ALL_GENERATOR_TYPE,
    ALL_GENERATORS,
    ALL_METHOD_TYPE,
    ALL_METHODS,
    ALL_MODULI,
    ALL_MODULUS_TYPE,
    ALL_NORMS,
)
from epsimeta.generators import Weierstrass, weierstrass_minimum_terms
from epsimeta.methods import PolynomialLSQ
from epsimeta.modulus import HolderModulus
from epsimeta.norms import MeanPowerNorm, UniformNorm


def test_kinds_are_unique():
    assert set(ALL_NORMS) == {"uniform", "mean_power"}
    assert set(ALL_METHODS) == {"nearest", "linear", "spline", "poly"}
    assert set(ALL_MODULI) == {"holder", "tabulated"}
    assert set(ALL_GENERATORS) == {
        "affine",
        "polynomial",
        "sine",
        "weierstrass",
        "fbm",
        "logistic",
    }


def test_discriminated_parsing():
    generator = TypeAdapter(ALL_GENERATOR_TYPE).validate_python(
        {"kind": "weierstrass", "n_points": 128}
    )

    assert generator == Weierstrass(n_points=128)

    method = TypeAdapter(ALL_METHOD_TYPE).validate_json('{"kind": "poly", "degree": 3}')

    assert method == PolynomialLSQ(degree=3)
    assert not method.interpolating

    modulus = TypeAdapter(ALL_MODULUS_TYPE).validate_python(
        {"kind": "holder", "L": 2.0, "p": 0.5}
    )

    assert modulus == HolderModulus(L=2.0, p=0.5)

    with pytest.raises(ValidationError):
        TypeAdapter(ALL_GENERATOR_TYPE).validate_python({"kind": "fourier"})


def test_specs_are_frozen():
    with pytest.raises(ValidationError):
        UniformNorm().kind = "mean_power"


def test_mean_power_norm():
    with pytest.raises(ValidationError):
        MeanPowerNorm(q=0.5)


def test_weierstrass_terms():
    assert weierstrass_minimum_terms(0.5) == 40
    assert Weierstrass().terms == 40
    assert Weierstrass(a=0.9).terms == weierstrass_minimum_terms(0.9)
    assert Weierstrass(a=0.5, terms=60).terms == 60

    with pytest.raises(ValidationError):
        Weierstrass(a=0.5, terms=39)

    with pytest.raises(ValidationError):
        Weierstrass(b=2)

    with pytest.raises(ValidationError):
        Weierstrass(a=1.5)
