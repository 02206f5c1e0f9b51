import functools
import time

import pytest

from trendprice.model import PHI2, PHI3, ModelConfig, as_spec
from trendprice.solver import SimConfig, simulate

ACCEPTANCE_LINES = []


@functools.lru_cache(maxsize=None)
def cached_run(R, phi="tanh"):
    """(trace, wall seconds) for the default Hopf setup at coupling R."""
    cfg = SimConfig(model=ModelConfig(trend_coupling=R, nonlinearity=as_spec(phi)))
    t0 = time.perf_counter()
    trace = simulate(cfg)
    return trace, time.perf_counter() - t0


@pytest.fixture(scope="session")
def hopf_run():
    return cached_run(12.0, PHI3.kind.value)


@pytest.fixture(scope="session")
def phi2_run():
    return cached_run(12.0, PHI2.kind.value)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
