import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from ochabv.fixtures import (  # noqa: E402
    pure_a_infinity_model,
    s2_model,
    two_generator_model,
)

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def s2():
    return s2_model()


@pytest.fixture(scope="session")
def two_gen():
    return two_generator_model()


@pytest.fixture(scope="session")
def pure_a():
    return pure_a_infinity_model()


@pytest.fixture(scope="session")
def data_dir():
    return DATA
