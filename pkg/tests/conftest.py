import pytest
from hypothesis import HealthCheck, settings

from dworkmod.suites import make_lift

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def classical2():
    return make_lift(2, 10, "classical")


@pytest.fixture(scope="session")
def perturbed2():
    return make_lift(2, 10, "perturbed")


@pytest.fixture(scope="session", params=["classical", "perturbed"])
def lift2(request):
    return make_lift(2, 10, request.param)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
