"""Execution budgets: deterministic fuel plus an optional wall-clock deadline.

Fuel is charged by the primitive semantics in proportion to the work they
are about to do (cells written, container elements visited). Charging
happens *before* large values are materialized, so a runaway line is cut
off without first exhausting memory. The wall-clock deadline is checked at
the same points; it exists for production use where absolute latency
matters, while fuel gives bit-identical behavior in tests.
"""

from __future__ import annotations

import time
from contextvars import ContextVar


class BudgetExceeded(Exception):
    """Raised when a line exceeds its fuel or wall-clock budget."""


class NestingLimit(Exception):
    """Raised when first-class-function call depth exceeds the cap."""


class LineBudget:
    """Per-line fuel/deadline state, reset by the interpreter at each line."""

    __slots__ = ("fuel", "wall", "used", "deadline", "depth", "max_depth")

    def __init__(self, fuel: int | None = None, wall: float | None = None,
                 max_depth: int = 1024):
        self.fuel = fuel
        self.wall = wall
        self.used = 0
        self.deadline: float | None = None
        self.depth = 0
        self.max_depth = max_depth

    def start_line(self) -> None:
        self.used = 0
        self.deadline = time.monotonic() + self.wall if self.wall else None

    def charge(self, units: int) -> None:
        if units < 1:
            units = 1
        self.used += units
        if self.fuel is not None and self.used > self.fuel:
            raise BudgetExceeded(f"fuel limit exceeded ({self.used} > {self.fuel})")
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise BudgetExceeded("per-line time limit exceeded")

    def enter_call(self) -> None:
        self.depth += 1
        if self.depth > self.max_depth:
            raise NestingLimit(f"call nesting exceeds {self.max_depth}")

    def exit_call(self) -> None:
        self.depth -= 1


_ACTIVE: ContextVar[LineBudget | None] = ContextVar("gridexit_budget", default=None)


def charge(units: int = 1) -> None:
    budget = _ACTIVE.get()
    if budget is not None:
        budget.charge(units)


def enter_call() -> None:
    budget = _ACTIVE.get()
    if budget is not None:
        budget.enter_call()


def exit_call() -> None:
    budget = _ACTIVE.get()
    if budget is not None:
        budget.exit_call()


def activate(budget: LineBudget | None):
    """Install `budget` for the current context; returns a reset token."""
    return _ACTIVE.set(budget)


def deactivate(token) -> None:
    _ACTIVE.reset(token)
