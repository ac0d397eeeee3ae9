import numpy as np
import pytest

from seysen_precoding.matrix_core import complex_to_real_matrix

ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_channel(rng, n=4):
    """Real expansion of an n x n CN(0, 1) channel."""
    Hc = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    return complex_to_real_matrix(Hc)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def hand_basis():
    # columns (1, 0) and (3, 1)
    return np.array([[1.0, 3.0], [0.0, 1.0]])
