import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def report(capsys):
    """Prints a criterion line immediately and keeps it for the session summary."""
    def emit(line):
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
