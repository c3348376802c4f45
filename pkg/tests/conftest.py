import numpy as np
import pytest

from tracedist import FinDist, NfaCoalgebra, PaCoalgebra, PseudometricSpace


@pytest.fixture
def line_space():
    # 1 - 2 - 3 on a line, unbounded so d(1, 3) = 2 is representable.
    return PseudometricSpace([1, 2, 3], [[0, 1, 2], [1, 0, 1], [2, 1, 0]], top=np.inf)


@pytest.fixture
def two_point():
    return PseudometricSpace(["a", "b"], [[0, 1], [1, 0]], top=1.0)


@pytest.fixture
def aa_nfa():
    """u accepts exactly "aa" (3-state chain); v accepts nothing (2-state chain); z accepts a*."""
    return NfaCoalgebra(
        ["u", "u1", "u2", "v", "v1", "z"], ["a"], ["u2", "z"],
        {("u", "a"): ["u1"], ("u1", "a"): ["u2"], ("v", "a"): ["v1"], ("z", "a"): ["z"]},
    )


@pytest.fixture
def pp_nfa():
    """p branches on a into q1 (only b) and q2 (only c); pp reaches one state with both."""
    return NfaCoalgebra(
        ["p", "q1", "q2", "pp", "qq", "f"], ["a", "b", "c"], ["f"],
        {("p", "a"): ["q1", "q2"], ("q1", "b"): ["f"], ("q2", "c"): ["f"],
         ("pp", "a"): ["qq"], ("qq", "b"): ["f"], ("qq", "c"): ["f"]},
    )


@pytest.fixture
def chain_pa():
    """q0 (out 0) -> q1 (out 1) -> q2 (out 0, self-loop) over the single symbol a."""
    d = FinDist.dirac
    return PaCoalgebra(
        ["q0", "q1", "q2"], ["a"], {"q0": 0.0, "q1": 1.0, "q2": 0.0},
        {("q0", "a"): d("q1"), ("q1", "a"): d("q2"), ("q2", "a"): d("q2")},
    )


# Acceptance outcomes, one line per criterion, echoed after the run.
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
