import pytest

from gbstrees import corpus
from gbstrees.model import GbsGraph, PathWord, TreeHandle


def word(*steps, base=0):
    return PathWord.of(base, *steps)


@pytest.fixture
def bs12():
    return corpus.load("bs_1_2")


@pytest.fixture
def bs23():
    return corpus.load("bs_2_3")


@pytest.fixture
def three_tori():
    return corpus.load("figure1_ball")


def two_edge_loop_master():
    """Two loops ``e`` (1,2) and ``f`` (2,3) at one vertex."""
    return GbsGraph.build(["v"], [("e", "v", "v", 1, 2), ("f", "v", "v", 2, 3)])


def full(g):
    return TreeHandle.full(g)


# criterion number -> (title, passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}


def record(n, title, passed, detail=""):
    ACCEPTANCE[n] = (title, passed, detail)
    print(f"[{'PASS' if passed else 'FAIL'}] criterion {n}: {title} ({detail})")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {n}: {title} ({detail})")
