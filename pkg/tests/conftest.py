import math

import mpmath as mp
import pytest

WEAK_PHI0 = 2 * math.pi * 1e-5


def mp_forms(z, phi0, theta, x=0.0, p=0.0, dps=60):
    """High-precision literal conjugate-pair sums; independent of the stable rewrites."""
    with mp.workdps(dps):
        z, phi0, theta = mp.mpf(z), mp.mpf(phi0), mp.mpf(theta)
        r2 = mp.mpf(x) ** 2 + mp.mpf(p) ** 2
        zt = z * mp.expjpi(phi0 / mp.pi)
        e = mp.expjpi(theta / mp.pi)
        prob = mp.re(2 - (1 - z) * e / (1 - zt) - (1 - z) / e / (1 - mp.conj(zt))) / 4
        f = lambda w: w / (1 - w) ** 2
        num = (1 - z) / 4 * mp.re(2 * f(z) - e * f(zt) - f(mp.conj(zt)) / e)
        g = lambda w: mp.exp(-2 * (1 - w) * r2 / (1 + w)) / (1 + w)
        wig = (1 - z) / (2 * mp.pi * prob) * mp.re(2 * g(z) - e * g(zt) - g(mp.conj(zt)) / e)
        return float(prob), float(num / prob), float(wig)


@pytest.fixture
def mp_oracle():
    return mp_forms


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_report():
    """Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def record(number, title, passed, detail):
        _ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} -- {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
