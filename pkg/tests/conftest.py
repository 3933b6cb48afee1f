import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", deadline=None, max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def blaschke_pair():
    from polydisc_toeplitz import Blaschke, Conj, parse_gaussian

    b1 = Blaschke(2, 1, parse_gaussian("1/2"))
    b2 = Blaschke(2, 2, parse_gaussian("1/3"))
    return Conj(b1) * b2
