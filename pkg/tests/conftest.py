import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from riskdemand import fixtures, kernels  # noqa: E402
from riskdemand.multi_period import MultiPeriodProfile  # noqa: E402

TOU_PRICES = [260.0, 520.0, 1040.0]


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    previous = kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(previous)


@pytest.fixture
def residential():
    return MultiPeriodProfile.build("exponential", [0.82, 1.56, 0.99], [1, 1, 1], TOU_PRICES,
                                    labels=("off-peak", "mid-peak", "peak"))


@pytest.fixture
def tariff():
    return fixtures.tariff()


@pytest.fixture
def portfolio():
    return fixtures.portfolio()


@pytest.fixture
def curve():
    return fixtures.load_curve()


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
