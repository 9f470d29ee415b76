import os
import sys

import hypothesis
import pytest

from opmin.builtins import shared_builtin
from opmin.complexes import D2_CHECKS

hypothesis.settings.register_profile("default", deadline=None, max_examples=25, derandomize=True)
hypothesis.settings.register_profile("thorough", deadline=None, max_examples=200)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def com():
    return shared_builtin("Com", "cochain", 4)


@pytest.fixture(scope="session")
def lie():
    return shared_builtin("Lie", "cochain", 4)


@pytest.fixture(scope="session")
def ass():
    return shared_builtin("Ass", "cochain", 4)


@pytest.fixture(scope="session")
def ger():
    return shared_builtin("Ger", "cochain", 3)


def pytest_terminal_summary(terminalreporter):
    acc = sys.modules.get("test_acceptance")
    if acc is not None and acc.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(acc.RESULTS):
            terminalreporter.write_line(acc.RESULTS[n])
    terminalreporter.write_line(f"exact d o d = 0 checks performed: {D2_CHECKS['count']}")
