import pytest

from alsharp.generate import random_mealy

# criterion number -> (description, outcome), filled by tests/test_acceptance.py
CRITERIA = {}


def record(number, description, ok, detail=""):
    CRITERIA[number] = (description, ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        desc, ok, detail = CRITERIA[n]
        line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}: {desc}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)


@pytest.fixture
def small_machine():
    return random_mealy(5, 2, 2, seed=3, minimal=True)
