import pytest

from gaplab.constructions import bounded_family, unbounded_family


@pytest.fixture(scope="session")
def bounded():
    return bounded_family(2)


@pytest.fixture(scope="session")
def unbounded():
    return unbounded_family(2)
