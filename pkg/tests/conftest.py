import pytest

from focusst.reference import load_reference


@pytest.fixture(scope="session")
def boiler_rules():
    return load_reference("steamboiler-rules")[0]


@pytest.fixture(scope="session")
def boiler_ite():
    return load_reference("steamboiler-ifthenelse")[0]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
