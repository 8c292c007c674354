"""Shared fixtures: canonical examples and kernel warm-up."""

from __future__ import annotations

import numpy as np
import pytest

import anchorsched as asd
from anchorsched import _kernels


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # pay any JIT compilation cost once, before timed tests run
    _kernels.warm_up()


# one "[acceptance] criterion k: PASS/FAIL" entry per criterion, echoed in
# the terminal summary so they are visible even under output capture
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def five_job_graph() -> asd.PrecedenceGraph:
    """Five jobs, eight arcs; the worked example used throughout the docs."""
    arcs = [(0, 1), (0, 2), (1, 3), (3, 5), (2, 4), (3, 4), (5, 6), (4, 6)]
    return asd.PrecedenceGraph(5, arcs, [1.0, 1.0, 1.0, 1.0, 2.0])


FIVE_DHAT = (0.5, 1.0, 0.5, 0.5, 0.5)


@pytest.fixture
def fig_box() -> asd.Instance:
    """Box uncertainty over the five-job example, deadline 4.5."""
    return asd.Instance(
        graph=five_job_graph(),
        delta=asd.Box(FIVE_DHAT),
        deadline=4.5,
        weights=np.ones(5),
        meta={},
    )


@pytest.fixture
def fig_budget() -> asd.Instance:
    """Budget-1 uncertainty over the five-job example, deadline 4.5."""
    return asd.Instance(
        graph=five_job_graph(),
        delta=asd.Budgeted(FIVE_DHAT, 1),
        deadline=4.5,
        weights=np.ones(5),
        meta={},
    )


def chain3_graph(p=(1.0, 1.0, 1.0)) -> asd.PrecedenceGraph:
    return asd.PrecedenceGraph(3, [(0, 1), (1, 2), (2, 3), (3, 4)], list(p))


@pytest.fixture
def chain3() -> asd.Instance:
    """Three-job chain, unit times and deviations, budget 1, deadline 3."""
    return asd.Instance(
        graph=chain3_graph(),
        delta=asd.Budgeted((1.0, 1.0, 1.0), 1),
        deadline=3.0,
        weights=np.ones(3),
        meta={},
    )
