import numpy as np
import pytest

from infosel.instance import make_instance

WORKED_PENALTIES = [[0.0, 0.3, 0.7], [0.5, 0.0, 0.5], [0.2, 0.8, 0.0]]
# source a: {0,1},{2}; source b: {0,2},{1}
WORKED_PARTITIONS = [[[0, 1], [2]], [[0, 2], [1]]]


@pytest.fixture
def worked():
    return make_instance(WORKED_PENALTIES, WORKED_PARTITIONS)


def discriminating(m, n, penalties=None):
    pen = penalties if penalties is not None else _uniform_penalties(m)
    return make_instance(pen, [[[h] for h in range(m)] for _ in range(n)])


def uninformative(m, n, penalties=None):
    pen = penalties if penalties is not None else _uniform_penalties(m)
    return make_instance(pen, [[list(range(m))] for _ in range(n)])


def _uniform_penalties(m):
    pen = np.full((m, m), 1.0 / (m - 1))
    np.fill_diagonal(pen, 0.0)
    return pen


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.REPORT:
        terminalreporter.section("acceptance criteria")
        for line in mod.REPORT:
            terminalreporter.write_line(line)
