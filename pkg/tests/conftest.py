import re

import numpy as np
import pytest

from chirpaf.waveform import WaveformParams

N = 127

_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def params():
    return WaveformParams(N, two_alpha=4, two_beta=2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


class _Recorder:
    def __init__(self, number):
        self.number = number

    def check(self, ok, detail):
        _ACCEPTANCE[self.number] = (bool(ok), detail)
        assert ok, detail


@pytest.fixture
def criterion(request):
    """Record the outcome of the acceptance criterion named in the test name."""
    num = int(re.search(r"criterion_(\d+)", request.node.name).group(1))
    yield _Recorder(num)
    _ACCEPTANCE.setdefault(num, (False, "error before the criterion was evaluated"))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
