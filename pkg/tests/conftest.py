import pytest

ACCEPTANCE_RESULTS = {}


@pytest.fixture
def record():
    """Stores one pass/fail line per acceptance criterion."""
    def _record(num, name, ok, detail=""):
        ACCEPTANCE_RESULTS[num] = (name, bool(ok), detail)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        name, ok, detail = ACCEPTANCE_RESULTS[num]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num:2d} {name}: {detail}")
