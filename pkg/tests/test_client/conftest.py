"""
Fixtures for the command-line tests.
"""

import sys

import numpy as np
import pytest
from loguru import logger
from typer.testing import CliRunner

from epsicomp.service.generators import generate
from epsicomp.storage import format_series
from epsimeta.generators import Weierstrass


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(autouse=True)
def workspace(tmp_path, monkeypatch):
    """
    Run every command from an empty directory, without user configuration,
    and restore the default log sink afterwards.
    """

    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("HOME", str(tmp_path))

    yield tmp_path

    logger.remove()
    logger.add(sys.stderr)


@pytest.fixture
def series_file(tmp_path):
    path = tmp_path / "weierstrass.csv"
    path.write_text(format_series(generate(Weierstrass(n_points=600)).values))
    return path


@pytest.fixture
def affine_file(tmp_path):
    path = tmp_path / "affine.csv"
    path.write_text(format_series(np.linspace(1.0, 4.0, 300)))
    return path
