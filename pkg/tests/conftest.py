import pytest
from hypothesis import HealthCheck, settings

from support import coffee, coffee_pay

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])
settings.load_profile("default")


@pytest.fixture(scope="session")
def coffee_lts():
    return coffee()


@pytest.fixture(scope="session")
def pay_lts():
    return coffee_pay()


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
