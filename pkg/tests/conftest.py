import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one ``ACCEPTANCE k: PASS/FAIL`` line and fail the test on FAIL."""

    def _report(k: int, checks: dict[str, bool], detail: str) -> None:
        ok = all(checks.values())
        failed = ", ".join(name for name, v in checks.items() if not v)
        line = f"ACCEPTANCE {k}: {'PASS' if ok else 'FAIL'}  {detail}"
        if failed:
            line += f"  [failed: {failed}]"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
