import numpy as np
import pytest

from qdfa import builtin, peripheral_projection
from qdfa.matcore import OperatorSubspace, matrix_unit, stack_vec

_criteria_lines: list[str] = []


def record_criterion(number: int, title: str, ok: bool, detail: str = ""):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title}"
    if detail:
        line += f"  [{detail}]"
    _criteria_lines.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if _criteria_lines:
        terminalreporter.section("acceptance criteria")
        for line in _criteria_lines:
            terminalreporter.write_line(line)


def E(d, i, j):
    """Matrix unit with 1-based indices, to keep test oracles readable."""
    return matrix_unit(d, i - 1, j - 1)


def span(*mats) -> OperatorSubspace:
    d = mats[0].shape[0]
    Q, _ = np.linalg.qr(stack_vec(mats))
    return OperatorSubspace.from_columns(d, Q)


def hs_projector(space: OperatorSubspace) -> np.ndarray:
    B = space.columns
    return B @ B.conj().T


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def block_projection_pd():
    return peripheral_projection(builtin("block_projection"))


@pytest.fixture(scope="session")
def trace_map_pd():
    return peripheral_projection(builtin("trace_map", 2))
