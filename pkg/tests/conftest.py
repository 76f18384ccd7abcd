import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the numba kernels once so timed checks measure steady state."""
    import numpy as np
    from distamp import kernels
    kernels.branch_gram(0.1, 2, 4)
    kernels.kraus_pairs(np.eye(3) / 3, 0.1, 1)
    kernels.walk_trials(3, 0.01, 2, 4, np.random.default_rng(0))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in mod.LINES:
            terminalreporter.write_line(line)
