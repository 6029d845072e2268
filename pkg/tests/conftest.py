import pytest

from pilqaoa.graphs import Graph

CRITERIA = []


def cycle(n):
    return Graph(n, tuple((i, (i + 1) % n, 1.0) for i in range(n)))


def complete(n):
    return Graph(n, tuple((u, v, 1.0) for u in range(n) for v in range(u + 1, n)))


@pytest.fixture
def triangle():
    return complete(3)


@pytest.fixture
def edge():
    return Graph(2, ((0, 1, 1.0),))


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for line in CRITERIA:
        terminalreporter.write_line(line)
