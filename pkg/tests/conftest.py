import pytest

from ffitts import embedded


@pytest.fixture(scope="session")
def paper_1d():
    return embedded("paper-1d")


@pytest.fixture(scope="session")
def paper_2d():
    return embedded("paper-2d")
