from importlib import resources

import pytest

from ridenuc.game import TableGame
from ridenuc.instance import parse_char_table


def bundled_table(name):
    return parse_char_table(resources.files("ridenuc.data").joinpath(name).read_text())


@pytest.fixture
def empty_core():
    """Three players, c_i = 5, pairs 7/7/9, c(N) = 12, vehicles seat two."""
    return TableGame(bundled_table("table1_empty_core.json"))


@pytest.fixture
def nonempty_core():
    """Same pairs, c(N) = 9, vehicles seat three."""
    return TableGame(bundled_table("table2_nonempty_core.json"))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(mod.RESULTS.values(), key=lambda item: item[1]):
        terminalreporter.write_line(line)
