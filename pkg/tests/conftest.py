import numpy as np
import pytest

from agtic.geometry import Sample


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)


def random_pair(rng, m, p=1, q=None):
    q = p if q is None else q
    x = rng.normal(size=(m, p))
    y = x[:, :1] ** 2 + 0.5 * rng.normal(size=(m, q))
    return Sample(x), Sample(y)


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one pass/fail line for an acceptance criterion."""
    def _report(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
