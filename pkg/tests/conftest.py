import numpy as np
import pytest

from wtp.sofic import golden_mean_chain
from wtp.symbolic import SpongeChain, validate_digit_system
from wtp.weights import exponents_from_bases


@pytest.fixture
def carpet():
    return validate_digit_system((2, 3), [(0, 0), (1, 1), (0, 2)])


@pytest.fixture
def carpet_chain(carpet):
    return SpongeChain(carpet)


@pytest.fixture
def carpet_exponents(carpet):
    return exponents_from_bases(carpet.bases)


@pytest.fixture
def golden():
    return golden_mean_chain()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
