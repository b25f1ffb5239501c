from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
_REPORT: list[str] = []


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture
def report():
    """Print one PASS/FAIL line per acceptance criterion and repeat it in the terminal summary."""

    def emit(name: str, ok: bool, detail: str):
        line = f"{name} {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        _REPORT.append(line)
        return ok

    return emit


def pytest_terminal_summary(terminalreporter):
    if _REPORT:
        terminalreporter.section("acceptance criteria")
        for line in _REPORT:
            terminalreporter.write_line(line)
