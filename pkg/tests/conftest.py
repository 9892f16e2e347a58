"""Shared fixtures: random grids, the toy task suite, acceptance reporting."""

from __future__ import annotations

import random

import pytest

from gridexit.dsl import parse_program
from gridexit.semantics import default_registry
from gridexit.taskio import SolverEntry, Task


@pytest.fixture(scope="session")
def registry():
    return default_registry()


def random_grid(rng: random.Random, max_side: int = 30, colors: int = 10):
    h = rng.randint(1, max_side)
    w = rng.randint(1, max_side)
    return tuple(tuple(rng.randrange(colors) for _ in range(w))
                 for _ in range(h))


def random_sparse_grid(rng: random.Random, max_side: int = 30):
    """Background-dominant grid, the shape task grids usually have."""
    h = rng.randint(1, max_side)
    w = rng.randint(1, max_side)
    bg = rng.randrange(10)
    cells = [[bg] * w for _ in range(h)]
    for _ in range(rng.randint(0, max(1, h * w // 5))):
        cells[rng.randrange(h)][rng.randrange(w)] = rng.randrange(10)
    return tuple(tuple(row) for row in cells)


# ---------------------------------------------------------------------------
# Toy task suite: five tasks, each solvable by a one-line program.

def _grid(*rows):
    return tuple(tuple(r) for r in rows)


TOY_INPUTS = {
    "identity": [_grid([1, 2, 3], [2, 3, 1]), _grid([3, 1], [1, 2], [2, 3])],
    "leftright": [_grid([1, 2, 3], [4, 5, 6]), _grid([2, 0], [0, 9])],
    "upsidedown": [_grid([1, 2], [3, 4], [5, 6]), _grid([0, 7, 0])],
    "doubled": [_grid([1, 2], [3, 4]), _grid([5], [6])],
    "recolored": [_grid([3, 0, 3], [0, 3, 0]), _grid([3, 3], [1, 3])],
}

# Held-out test inputs use irregular patterns heavy in color 9 (absent
# from the demos) so that a relabeled demonstration output colliding with
# a test grid by value would be an actual leak, not a coincidence.
TOY_TEST_INPUTS = {
    "identity": _grid([9, 1, 4, 2], [2, 9, 1, 4], [4, 2, 9, 1]),
    "leftright": _grid([9, 2, 4, 7], [7, 9, 2, 4], [4, 7, 9, 2]),
    "upsidedown": _grid([1, 9, 6], [6, 1, 9], [9, 6, 1], [1, 6, 9]),
    "doubled": _grid([9, 5], [5, 9], [2, 9]),
    "recolored": _grid([3, 9, 3, 1], [1, 3, 9, 3]),
}

TOY_SOLVERS = {
    "identity": "O = replace(I, TEN, TEN)",
    "leftright": "O = vmirror(I)",
    "upsidedown": "O = rot180(I)",
    "doubled": "O = hconcat(I, I)",
    "recolored": "O = replace(I, THREE, SEVEN)",
}


def make_toy_suite() -> tuple[list[Task], list[SolverEntry]]:
    """Five tasks with two demos and one held-out test each."""
    registry = default_registry()
    tasks = []
    solvers = []
    for task_id, inputs in TOY_INPUTS.items():
        program = parse_program(TOY_SOLVERS[task_id], registry)
        from gridexit.interpreter import execute
        pairs = []
        for grid in inputs + [TOY_TEST_INPUTS[task_id]]:
            outcome = execute(program, grid)
            assert outcome.ok, (task_id, outcome)
            pairs.append((grid, outcome.output))
        tasks.append(Task(task_id=task_id, demos=tuple(pairs[:2]),
                          tests=(pairs[2],)))
        solvers.append(SolverEntry(task_id, TOY_SOLVERS[task_id]))
    return tasks, solvers


@pytest.fixture(scope="session")
def toy_suite():
    return make_toy_suite()


# ---------------------------------------------------------------------------
# Acceptance reporting: one PASS/FAIL line per criterion at session end.

_ACCEPTANCE_RESULTS: dict[str, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call" or "test_acceptance" not in str(item.fspath):
        return
    label = item.name
    if report.passed:
        _ACCEPTANCE_RESULTS[label] = "PASS"
    elif report.failed:
        _ACCEPTANCE_RESULTS[label] = "FAIL"
    elif report.skipped:
        reason = ""
        if isinstance(report.longrepr, tuple):
            reason = report.longrepr[2]
        _ACCEPTANCE_RESULTS[label] = f"SKIP ({reason})"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name in sorted(_ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"{_ACCEPTANCE_RESULTS[name]:24s} {name}")
