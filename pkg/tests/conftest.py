import math

import mpmath
import pytest

from loceuclid import Param

# one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def rho_closed_form(t: float, D: float) -> float:
    """Independent value of rho_t at separation D.

    Below 2 the cheapest chain is the straight step, a two-step fold whose
    long step is exactly 2 (cost 2t + 2 - D), or two full steps (4t).
    Beyond 2 write D = 2k + r: k full steps then the remainder, which costs
    r or, if cheaper, one more fold (2t).
    """
    if D < 2.0:
        return min(D, 2.0 * t + 2.0 - D, 4.0 * t)
    k = math.floor(D / 2.0)
    r = D - 2.0 * k
    return 2.0 * t * k + min(r, 2.0 * t)


def alpha_mp(t: float) -> float:
    with mpmath.workdps(40):
        t = mpmath.mpf(t)
        return float(mpmath.asin((mpmath.sqrt(2 - t * t) - t) / 2))


def c_star_mp(t: float) -> float:
    with mpmath.workdps(40):
        t = mpmath.mpf(t)
        return float(t + mpmath.sqrt(2 - t * t))


def chord_cost_mp(t: float, c: float) -> float:
    with mpmath.workdps(40):
        t, c = mpmath.mpf(t), mpmath.mpf(c)
        if c <= t + mpmath.sqrt(2 - t * t):
            return float(c)
        return float(2 * t + mpmath.sqrt(4 - c * c))


@pytest.fixture(params=[0.3, 0.6, 0.9, 1.0], ids=lambda t: f"t={t}")
def param(request):
    return Param(request.param)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
