import numpy as np
import pytest

from helpers import ACCEPTANCE, FS
from svfront.core import Waveform


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def noise3s():
    return Waveform(np.random.default_rng(7).standard_normal(3 * FS) * 0.1, FS)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
