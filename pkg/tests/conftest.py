import pytest
from click.testing import CliRunner

from stratjet import create_app, init_services
from stratjet.config.config import TestingConfig
from stratjet.models.field import ScalarField
from stratjet.schemas.grammar import parse_poly

QQ_FIELD = ScalarField(0)


@pytest.fixture(scope='session')
def services():
    """One set of services shared by every test"""
    return init_services(TestingConfig)


@pytest.fixture
def cli():
    return create_app('testing')


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False)


@pytest.fixture
def poly():
    """Parse a polynomial literal; d is inferred when omitted"""
    def make(text, d=None, char=0):
        return parse_poly(text, d, ScalarField(char))
    return make


@pytest.fixture
def catalog(services):
    return services['fixtures'].catalog(QQ_FIELD)
