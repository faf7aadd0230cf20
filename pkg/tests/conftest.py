import pytest

_criterion_lines = []


@pytest.fixture
def criterion_report():
    """Record one pass/fail line per acceptance criterion for the run summary."""

    def _report(number: int, ok: bool, text: str) -> None:
        line = f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {text}"
        _criterion_lines.append(line)
        print(line)
        assert ok, f"criterion {number}: {text}"

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_criterion_lines):
            terminalreporter.write_line(line)
