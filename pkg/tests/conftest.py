"""Shared fixtures: the canonical hand instances used across the suite."""

from fractions import Fraction as F

import pytest

from matchlab.graph import graph_from_edges


@pytest.fixture
def triangle():
    """Odd cycle with near-equal weights; LP is loose (objective 33/20)."""
    return graph_from_edges([(0, 1, F(1)), (1, 2, F(11, 10)),
                             (0, 2, F(12, 10))])


@pytest.fixture
def loose_c5():
    """5-cycle with weights 1.0..1.4; LP is loose (objective 3)."""
    w = [F(10 + i, 10) for i in range(5)]
    return graph_from_edges([(i, (i + 1) % 5, w[i]) for i in range(5)])


@pytest.fixture
def path3():
    """Path a-b-c with weights 2, 1: tight, unique optimum {ab}."""
    return graph_from_edges([(0, 1, F(2)), (1, 2, F(1))])


@pytest.fixture
def four_cycle():
    """Even cycle with weights 3,1,3,1: tight, optimum {e0, e2}."""
    return graph_from_edges([(0, 1, F(3)), (1, 2, F(1)),
                             (2, 3, F(3)), (3, 0, F(1))])


@pytest.fixture
def single_edge():
    return graph_from_edges([(0, 1, F(5))])
