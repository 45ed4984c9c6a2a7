import pytest

from elastic_schwarz.analysis import ElasticMedium


@pytest.fixture(scope="session")
def medium() -> ElasticMedium:
    """Reference medium of all the experiments: cp=1, cs=0.5, rho=1."""
    return ElasticMedium.from_speeds(rho=1.0, cp=1.0, cs=0.5)
