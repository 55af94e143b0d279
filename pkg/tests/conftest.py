import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from roughcalc.grid import GridSpec, SampledField, make_bump

settings.register_profile(
    "default",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def spec64():
    return GridSpec(2, 4.0, 64)


@pytest.fixture(scope="session")
def spec128():
    return GridSpec(2, 4.0, 128)


@pytest.fixture(scope="session")
def spec256():
    return GridSpec(2, 4.0, 256)


@pytest.fixture(scope="session")
def bump128(spec128):
    return make_bump(spec128, (0.2, -0.1), 1.2, 1.0)


@pytest.fixture(scope="session")
def bump64(spec64):
    return make_bump(spec64, (0.2, -0.1), 1.2, 1.0)


def disk_indicator(spec, radius=1.0):
    return SampledField(spec, (spec.radius() <= radius).astype(float))


def pytest_terminal_summary(terminalreporter):
    # one line per acceptance criterion, visible even with captured output
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(lines):
        terminalreporter.write_line(lines[k])
