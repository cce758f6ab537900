import pytest

from ebr_reasoner._fixtures import load_fixture
from ebr_reasoner._oracle import materialize


@pytest.fixture(scope="session")
def father_kb():
    return load_fixture("father")


@pytest.fixture(scope="session")
def family_kb():
    return load_fixture("family-small")


@pytest.fixture(scope="session")
def family_mkb(family_kb):
    return materialize(family_kb)


@pytest.fixture(scope="session")
def knows_kb():
    return load_fixture("incomplete-knows")


@pytest.fixture(scope="session")
def abc_kb():
    return load_fixture("inconsistent-abc")
