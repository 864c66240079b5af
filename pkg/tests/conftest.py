import numpy as np
import pytest

from freqgc import FrequencyGrid
from freqgc.harness import FIG1_SYSTEM, FIG2_SYSTEM, build_system
from freqgc.harness.config import with_receiver

FS = 120.0


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def fig1_model():
    return build_system(FIG1_SYSTEM)


@pytest.fixture(scope="session")
def fig2_models():
    return {f0: build_system(with_receiver(FIG2_SYSTEM, f0)) for f0 in (10.0, 30.0, 50.0)}


@pytest.fixture(scope="session")
def grid():
    return FrequencyGrid(FS, 512)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    verdicts = getattr(module, "VERDICTS", None)
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for line in sorted(verdicts, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
