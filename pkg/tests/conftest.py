import math

import pytest

from barnes_zeta import validate_params

ZETA2 = math.pi ** 2 / 6
ZETA3 = 1.2020569031595943
ZETA_1_5 = 2.6123753486854883


@pytest.fixture
def unit_params():
    return validate_params(1, 1, 1)


@pytest.fixture
def sqrt2_params():
    return validate_params(1, 1, 1, ratio_irrational=True, irrational_scale=math.sqrt(2))


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
