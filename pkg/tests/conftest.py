import math

import pytest

from ruellezeta.schottky import build_funneled_torus, build_three_funnel
from ruellezeta.symmetry import (klein_four_three_funnel, klein_four_torus,
                                 trivial_group)

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def record():
    """One printed PASS/FAIL line per acceptance criterion."""
    def _record(criterion, ok, detail):
        line = "criterion %2d: %s  %s" % (criterion,
                                          "PASS" if ok else "FAIL", detail)
        ACCEPTANCE_LINES.append(line)
        return line
    return _record


# canonical example surfaces; session scope because construction validates
# disc geometry with boundary sampling


@pytest.fixture(scope="session")
def torus():
    return build_funneled_torus(10.0, 10.0, math.pi / 2)


@pytest.fixture(scope="session")
def funnel():
    return build_three_funnel(12.0, 12.0, 12.0)


@pytest.fixture(scope="session")
def torus_group(torus):
    return klein_four_torus(torus)


@pytest.fixture(scope="session")
def funnel_group(funnel):
    return klein_four_three_funnel(funnel)


@pytest.fixture(scope="session")
def trivial():
    return trivial_group(2)
