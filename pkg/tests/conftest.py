import pytest

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def acceptance():
    """Record one verdict per acceptance criterion; printed in the terminal summary."""

    def record(number: int, passed: bool, note: str = "") -> bool:
        ACCEPTANCE[number] = (bool(passed), note)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} {note}".rstrip())
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        passed, note = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if passed else 'FAIL'} {note}".rstrip())
