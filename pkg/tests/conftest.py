import pytest

from rydslp import params

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def fig2():
    return params.canonical()


@pytest.fixture
def fig3():
    return params.RB87.model_params(), params.RB87.medium()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
