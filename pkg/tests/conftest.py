import pytest

from hsecagg.mds import find_t_private_mds
from hsecagg.params import EXAMPLE_1, EXAMPLE_2


def _searched(params):
    res = find_t_private_mds(params)
    return params.with_q(res.q), res.mds


@pytest.fixture(scope="session")
def ex1():
    """(params with q, certified matrix) for Example 1."""
    return _searched(EXAMPLE_1)


@pytest.fixture(scope="session")
def ex2():
    return _searched(EXAMPLE_2)


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion for the run summary."""
    def record(criterion, ok, detail):
        line = f"{criterion} {'PASS' if ok else 'FAIL'}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
