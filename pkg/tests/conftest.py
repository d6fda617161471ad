import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from subfekete import Subshift
from subfekete.matrix_jsr import MatrixSet, matrix_functional
from subfekete.turing import TuringMachine

FIXTURES = Path(__file__).parent / "fixtures"
_criteria: dict[int, tuple[str, str, float]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or not marker.args:
        return
    number, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _criteria[number] = (title, "PASS" if rep.passed else "FAIL", rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, status, duration = _criteria[number]
        terminalreporter.write_line(f"criterion {number:2d} {status}  {title} ({duration:.2f} s)")


@pytest.fixture
def diag_set():
    return MatrixSet.from_lists([np.diag([0.3, 0.3]), np.diag([100.0, 100.0])])


@pytest.fixture
def diag_f(diag_set):
    return matrix_functional(diag_set)


@pytest.fixture
def no11(diag_set):
    return Subshift.from_strings(diag_set.alphabet, ["11"])


@pytest.fixture
def golden_set():
    return MatrixSet.from_lists([[[1, 1], [0, 1]], [[1, 0], [1, 1]]])


def right_mover():
    return TuringMachine.from_rows(1, 2, [(0, 0, 0, "R", 0), (0, 1, 0, "R", 0)])


def bouncer():
    return TuringMachine.from_rows(
        2, 2, [(0, 0, 0, "R", 1), (0, 1, 1, "R", 1), (1, 0, 0, "L", 0), (1, 1, 1, "L", 0)]
    )


def halter():
    return TuringMachine.from_rows(1, 2, [], halts=[(0, 0), (0, 1)])


def random_matrix_set(rng, max_dim=3, max_alpha=3, norm="spectral"):
    d = int(rng.integers(1, max_dim + 1))
    a = int(rng.integers(1, max_alpha + 1))
    return MatrixSet.from_lists([rng.uniform(-2, 2, (d, d)) for _ in range(a)], norm)


def random_machine(rng, max_states=4, max_symbols=3):
    q = int(rng.integers(1, max_states + 1))
    t = int(rng.integers(2, max_symbols + 1))
    rows, halts = [], []
    for state in range(q):
        for sym in range(t):
            if rng.random() < 0.1:
                halts.append((state, sym))
            else:
                rows.append(
                    (state, sym, int(rng.integers(t)), "LR"[int(rng.integers(2))], int(rng.integers(q)))
                )
    return TuringMachine.from_rows(q, t, rows, halts)
