"""Sandboxed, budgeted execution of programs on input grids.

Execution is pure: it owns its variable environment, never touches shared
state, and reports faults as outcome statuses instead of raising. A line
that exceeds its budget yields a ``timeout`` outcome; a fault inside a
primitive yields ``runtime_error``; a final value that is not a valid task
grid yields ``invalid_output``.

Two budget mechanisms exist side by side: a deterministic fuel limit
(authoritative in tests) and a wall-clock limit per line (the production
guard, defaulting to 0.25 s). Either may be disabled by passing None.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass
from typing import Optional

# The first-class-function nesting cap (1024 in `limits`) must be able to
# fire before CPython's own frame limit; each nested call costs a few
# frames.
if sys.getrecursionlimit() < 6000:
    sys.setrecursionlimit(6000)

from . import limits
from .dsl import CONSTANTS, Program, Registry, Term
from .grid import Grid, grids_equal, is_valid_grid
from .semantics import default_registry, primitive_value

DEFAULT_WALL_PER_LINE = 0.25
DEFAULT_FUEL_PER_LINE = 2_000_000

STATUS_OK = "ok"
STATUS_RUNTIME_ERROR = "runtime_error"
STATUS_TIMEOUT = "timeout"
STATUS_INVALID = "invalid_output"


@dataclass(frozen=True)
class ExecOutcome:
    status: str
    output: Optional[Grid] = None
    error: str = ""
    elapsed: tuple[float, ...] = ()  # per executed line, seconds

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK


@dataclass(frozen=True)
class RunReport:
    per_example: tuple[ExecOutcome, ...]
    match_fraction: float

    @property
    def all_ok(self) -> bool:
        return all(o.ok for o in self.per_example)


def _resolve(term: Term, env: dict, registry: Registry):
    if term.kind == "input":
        return env["I"]
    if term.kind == "variable":
        return env[term.name]
    if term.kind == "constant":
        return CONSTANTS[term.name][0]
    return primitive_value(registry.get(term.name))


def execute_value(p: Program, value, *,
                  registry: Optional[Registry] = None,
                  wall_per_line: Optional[float] = DEFAULT_WALL_PER_LINE,
                  fuel_per_line: Optional[int] = DEFAULT_FUEL_PER_LINE):
    """Run a program on an arbitrary input value, returning the raw result.

    Returns ``(status, value_or_error, per_line_elapsed)`` where status is
    "ok", "runtime_error", or "timeout" and the final value is *not*
    checked for grid validity. `execute` layers the validity check on top.
    """
    registry = registry or default_registry()
    env: dict = {"I": value}
    budget = limits.LineBudget(fuel=fuel_per_line, wall=wall_per_line)
    token = limits.activate(budget)
    elapsed: list[float] = []
    try:
        for line in p.lines:
            primitive = registry.get(line.func)
            budget.start_line()
            started = time.perf_counter()
            try:
                args = [_resolve(t, env, registry) for t in line.args]
                env[line.var] = primitive.fn(*args)
            except limits.BudgetExceeded as exc:
                elapsed.append(time.perf_counter() - started)
                return STATUS_TIMEOUT, str(exc), tuple(elapsed)
            except limits.NestingLimit as exc:
                elapsed.append(time.perf_counter() - started)
                return STATUS_RUNTIME_ERROR, str(exc), tuple(elapsed)
            except Exception as exc:
                elapsed.append(time.perf_counter() - started)
                return (STATUS_RUNTIME_ERROR,
                        f"{type(exc).__name__}: {exc}", tuple(elapsed))
            elapsed.append(time.perf_counter() - started)
        return STATUS_OK, env["O"], tuple(elapsed)
    finally:
        limits.deactivate(token)


def execute(p: Program, input_grid: Grid, *,
            registry: Optional[Registry] = None,
            wall_per_line: Optional[float] = DEFAULT_WALL_PER_LINE,
            fuel_per_line: Optional[int] = DEFAULT_FUEL_PER_LINE) -> ExecOutcome:
    """Run a typechecked program on a valid input grid.

    Deterministic given (program, input, fuel limit); never raises for
    faults inside the program.
    """
    status, value, elapsed = execute_value(
        p, input_grid, registry=registry,
        wall_per_line=wall_per_line, fuel_per_line=fuel_per_line)
    if status != STATUS_OK:
        return ExecOutcome(status=status, error=value, elapsed=elapsed)
    if not is_valid_grid(value):
        return ExecOutcome(status=STATUS_INVALID, elapsed=elapsed,
                           error="output is not a valid grid")
    return ExecOutcome(status=STATUS_OK, output=value, elapsed=elapsed)


def run_on_examples(p: Program, examples, *,
                    registry: Optional[Registry] = None,
                    wall_per_line: Optional[float] = DEFAULT_WALL_PER_LINE,
                    fuel_per_line: Optional[int] = DEFAULT_FUEL_PER_LINE) -> RunReport:
    """Execute on every (input, target) pair and score the match fraction.

    match_fraction = fraction of examples whose execution succeeded and
    reproduced the target exactly.
    """
    outcomes = []
    matched = 0
    for input_grid, target in examples:
        outcome = execute(p, input_grid, registry=registry,
                          wall_per_line=wall_per_line,
                          fuel_per_line=fuel_per_line)
        outcomes.append(outcome)
        if outcome.ok and grids_equal(outcome.output, target):
            matched += 1
    fraction = matched / len(outcomes) if outcomes else 0.0
    return RunReport(per_example=tuple(outcomes), match_fraction=fraction)
