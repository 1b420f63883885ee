import pytest
from hypothesis import settings

from ringbin._heap import retain_heap

settings.register_profile("ringbin", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("ringbin")


def pytest_sessionstart(session):
    retain_heap()


@pytest.fixture(scope="session")
def bundled():
    from ringbin.scenario import bundled_scenarios
    return bundled_scenarios()
