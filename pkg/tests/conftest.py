import pytest

# criterion number -> one-line verdict, filled in by test_acceptance.py
ACCEPTANCE = {}


def record(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[number] = f"acceptance {number}: {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
