import fractions
import os
import pathlib
import tempfile

import pytest

from satsir.model import ModelParams, reference_params


F = fractions.Fraction


@pytest.fixture
def temp_dir():
    with tempfile.TemporaryDirectory() as tmp:
        yield pathlib.Path(tmp)


@pytest.fixture(autouse=True)
def isolated_env(mocker):
    """Keep user settings and logging configuration out of the tests."""
    clean = {k: v for k, v in os.environ.items()
             if not k.startswith('SATSIR_') and k not in ('LOG_CONFIG', 'LOG_LEVEL')}
    mocker.patch.dict('os.environ', clean, clear=True)


@pytest.fixture
def params():
    yield reference_params(0.1)


@pytest.fixture
def params_factory():
    def factory(gamma):
        return reference_params(gamma)
    yield factory


@pytest.fixture
def exact_params():
    """Reference parameters as exact rationals, gamma settable."""
    def factory(gamma=F(1, 10)):
        return ModelParams(
            beta=F(1, 20),
            lam=F(10),
            mu=F(1, 100),
            mu_prime=F(1, 10),
            alpha=F(1, 5),
            rho=F(1, 10),
            gamma=gamma,
        )
    yield factory
