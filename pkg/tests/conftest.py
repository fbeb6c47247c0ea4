import math
import sys

import pytest

from fracdirac.dirac_system import DiracProblem


@pytest.fixture
def free_problem():
    """p = r = 0: phi = (-sin(lam S), cos(lam S)), Delta = sin(lam S(b))."""
    return DiracProblem("0", "0")


@pytest.fixture
def ex1():
    return DiracProblem("1/(1+x)", "1/(1+x^2)")


PI_POW_08 = 2.49873326304636302  # mpmath, 30 digits
HALF_POW_08 = 0.574349177498517503
EXP_PI_POW_08 = 12.1670717154422214


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results.values():
            terminalreporter.write_line(line)
