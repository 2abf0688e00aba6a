import pytest
from hypothesis import HealthCheck, settings
from mpmath import mp

settings.register_profile(
    "compulse",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("compulse")


@pytest.fixture(autouse=True)
def _restore_precision():
    saved = mp.dps
    yield
    mp.dps = saved
