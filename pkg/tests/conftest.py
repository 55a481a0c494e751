import numpy as np
import pytest

from sarfima import SarfimaSpec, SeasonalComponent, SimConfig, simulate

# One pass/fail line per acceptance criterion, emitted after the summary so
# they survive pytest's output capture.
ACCEPTANCE_LINES = []


def record_acceptance(criterion: int, name: str, ok: bool, detail: str = ""):
    line = f"ACCEPTANCE {criterion} [{name}]: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line, flush=True)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def quarterly_spec():
    return SarfimaSpec(components=(SeasonalComponent(4, 0.3),))


@pytest.fixture(scope="session")
def two_period_spec():
    return SarfimaSpec(components=(SeasonalComponent(1, 0.1),
                                   SeasonalComponent(4, 0.3)))


@pytest.fixture(scope="session")
def quarterly_path(quarterly_spec):
    return simulate(SimConfig(spec=quarterly_spec, n=1080, seed=20260401))


@pytest.fixture(scope="session")
def two_period_path(two_period_spec):
    return simulate(SimConfig(spec=two_period_spec, n=1080, seed=20260402))


@pytest.fixture
def rng():
    return np.random.default_rng(987654321)
