"""Shared pytest hooks: the acceptance suite reports one line per criterion."""

ACCEPTANCE_RESULTS = {}


def record_acceptance(number, passed, detail):
    ACCEPTANCE_RESULTS[number] = (bool(passed), detail)
    print(f"ACCEPTANCE {number}: {'PASS' if passed else 'FAIL'} - {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}")
