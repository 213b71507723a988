import pytest
from hypothesis import settings

from oswave.profile import make_builtin

settings.register_profile("oswave", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("oswave")


@pytest.fixture(scope="session")
def expo():
    return make_builtin("exponential")


@pytest.fixture(scope="session")
def tanh_profile():
    return make_builtin("tanh")
