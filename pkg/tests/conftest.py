"""Shared fixtures: the worked example, standard maps and problem files."""

import logging
from collections.abc import Iterator
from pathlib import Path

import pytest

from compvar.dynamics.pwmap import PiecewiseMap
from compvar.tools.worked_example import worked_example_map, worked_example_problem
from compvar.variational.problem import Problem

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def restore_logging() -> Iterator[None]:
    """Undo setup_logging: root handlers, package level and warning capture."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    logging.captureWarnings(False)
    root.handlers[:] = handlers
    root.setLevel(level)
    logging.getLogger("compvar").setLevel(logging.NOTSET)


@pytest.fixture
def data_dir() -> Path:
    """Directory holding one problem file per CLI case."""
    return DATA_DIR


@pytest.fixture
def worked_map() -> PiecewiseMap:
    """q(x) = 1 - 2x on [0, 1/2), 2 - 2x on [1/2, 1]."""
    return worked_example_map()


@pytest.fixture
def per_branch_problem() -> Problem:
    """Worked example with branch-wise self-composition."""
    return worked_example_problem("per_branch")


@pytest.fixture
def actual_problem() -> Problem:
    """Worked example with the literal composition q(q(x))."""
    return worked_example_problem("actual")


@pytest.fixture
def perturbed_map() -> PiecewiseMap:
    """Worked-example map with the first slope changed to -1.9."""
    return PiecewiseMap.from_records(
        [((0.0, 0.5), "-1.9*x + 1"), ((0.5, 1.0), "-2*x + 2")],
        self_composable=True,
    )


@pytest.fixture
def tent_map() -> PiecewiseMap:
    return PiecewiseMap.from_records([((0.0, 0.5), "2*x"), ((0.5, 1.0), "2 - 2*x")], self_composable=True)


@pytest.fixture
def logistic_map() -> PiecewiseMap:
    return PiecewiseMap.from_records(
        [((0.0, 0.5), "4*x*(1 - x)"), ((0.5, 1.0), "4*x*(1 - x)")],
        self_composable=True,
    )
