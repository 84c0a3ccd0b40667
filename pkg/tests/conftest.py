import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from suspwalls import fixtures


@pytest.fixture(scope="session")
def fp_rep():
    return fixtures.load("fp")


@pytest.fixture(scope="session")
def f4_rep():
    return fixtures.load("f4")


@pytest.fixture(scope="session")
def alpha_rep():
    return fixtures.load("alpha2")
