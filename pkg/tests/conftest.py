import sys

import numpy as np
import pytest

from hslab.ambient import AmbientSpace

SPACES = [AmbientSpace.CH(2), AmbientSpace.CH(3), AmbientSpace.CP(3), AmbientSpace.HH(2)]


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in mod.LINES:
            terminalreporter.write_line(line)
