import pytest

from radialmax import generate

ACCEPTANCE_LINES = {}


@pytest.fixture(scope="session")
def cantor12():
    return generate("cantor", 12, base=3, digits=[0, 2])


@pytest.fixture(scope="session")
def full8():
    return generate("full_interval", 8)


@pytest.fixture(scope="session")
def point4():
    return generate("finite_points", 4, points=[1.0])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
