import numpy as np
import pytest

from besseweyl.arith import Weights

ACCEPTANCE: dict[int, tuple[bool, str]] = {}

WEIGHT_SET = [Weights(1, 1), Weights(3, 1), Weights(5, 3)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
