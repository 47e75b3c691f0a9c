import math
import time

import pytest

from eberhard_sim.simulate import RunConfig, sweep

LOSSY_THRESHOLD = -0.995
FIG_THETAS_DEG = list(range(0, 181, 10))
FIG_TRIALS = 400_000
DEFAULT_SEED = 1

ACCEPTANCE_LINES: list[str] = []
SWEEP_SECONDS: dict[float, float] = {}


def fig_sweep(V):
    t0 = time.perf_counter()
    results = sweep(RunConfig([math.radians(d) for d in FIG_THETAS_DEG], V, FIG_TRIALS, DEFAULT_SEED))
    SWEEP_SECONDS[V] = time.perf_counter() - t0
    return results


@pytest.fixture(scope="session")
def sweep_v0():
    return fig_sweep(0.0)


@pytest.fixture(scope="session")
def sweep_lossy():
    return fig_sweep(LOSSY_THRESHOLD)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
