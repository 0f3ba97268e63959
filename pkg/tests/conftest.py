import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from offshore_awe import spar  # noqa: E402
from offshore_awe.config import load_config  # noqa: E402
from offshore_awe.matfile import read_matrix_file  # noqa: E402
from offshore_awe.config import builtin_path  # noqa: E402


@pytest.fixture(scope="session")
def spar_model():
    return spar.calibrate()


@pytest.fixture(scope="session")
def shipped_matrices():
    return read_matrix_file(builtin_path("data/paper_like_spar.txt"))


@pytest.fixture()
def paper_config():
    return load_config("builtin:paper_baseline")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])
