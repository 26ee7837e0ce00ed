import pytest

# filled by test_acceptance.py: criterion -> (passed, detail)
ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")


@pytest.fixture
def acceptance():
    def record(name, passed, detail):
        ACCEPTANCE_RESULTS[name] = (bool(passed), detail)
        return passed

    return record
