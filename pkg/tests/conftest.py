import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(autouse=True)
def _clean_precision_env(monkeypatch):
    monkeypatch.delenv("NEWTONFORGE_PRECISION", raising=False)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
