import os

import pytest
from hypothesis import HealthCheck, settings

from mmt import examples as ex
from mmt.elaborate import Elaborator

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def running():
    return ex.running_example()


@pytest.fixture
def el(running):
    return Elaborator(running)


@pytest.fixture
def sharing():
    return ex.sharing_example()
