import pytest
from hypothesis import settings

# order tables are cached on first use, so individual examples vary wildly in cost
settings.register_profile("spectrumkit", deadline=None)
settings.load_profile("spectrumkit")

ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(key: str, passed: bool, detail: str) -> None:
        line = f"{'PASS' if passed else 'FAIL'} {key}: {detail}"
        ACCEPTANCE_LINES[key] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
