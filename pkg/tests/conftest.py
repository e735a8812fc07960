import pytest

import fuzzylos as fz


@pytest.fixture(scope="session")
def default_fis():
    return fz.default_fis()


@pytest.fixture(scope="session")
def default_model():
    return fz.default_regions()
