import pytest

from pointerlab.scenarios import SCENARIOS, run_scenario

# Verdict lines collected by the acceptance gate, replayed after the run so
# they survive output capture in any invocation.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def default_reports():
    """Every scenario run once at its default configuration."""
    return {name: run_scenario(name) for name in SCENARIOS}


@pytest.fixture
def acceptance_verdict():
    def emit(number: int, name: str, ok: bool, detail: str = "") -> None:
        line = f"ACCEPTANCE C{number} {'PASS' if ok else 'FAIL'} - {name}"
        if detail:
            line = f"{line} [{detail}]"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, f"C{number} {name}: {detail}"

    return emit


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1][1:])):
            terminalreporter.write_line(line)
