"""Scoring protocols: demonstration performance, top-3 selection, pass@3,
the per-test-example expansion variant, and solved-set comparison.

Candidate solutions are ranked by demonstration performance (descending),
then printed-program length in characters (ascending), then discovery
order (ascending); the first three run against the held-out test examples
and a task counts as solved if any of them maps every test input to the
expected output. The 412-unit variant splits each task into one unit per
test example and scores only the single top candidate (pass@1).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .dsl import ProgramError, Registry, parse_program
from .grid import grids_equal
from .interpreter import execute
from .semantics import default_registry
from .taskio import Task


@dataclass(frozen=True)
class Candidate:
    program_text: str
    demo_performance: float
    length: int
    discovery_order: int


@dataclass(frozen=True)
class TaskVerdict:
    task_id: str
    selected_programs: tuple[str, ...]
    solved: bool
    per_test_correct: tuple[bool, ...]


@dataclass
class EvalSummary:
    verdicts: list[TaskVerdict] = field(default_factory=list)
    solved: int = 0
    total: int = 0
    executions: int = 0  # programs run against test examples, for auditing

    def rate(self) -> float:
        return self.solved / self.total if self.total else 0.0


def demonstration_performance(program, task: Task, *,
                              registry: Optional[Registry] = None,
                              wall_per_line: Optional[float] = 0.25,
                              fuel_per_line: Optional[int] = 2_000_000) -> float:
    """Fraction of the task's demonstration pairs the program reproduces."""
    from .interpreter import run_on_examples
    report = run_on_examples(program, task.demos, registry=registry,
                             wall_per_line=wall_per_line,
                             fuel_per_line=fuel_per_line)
    return report.match_fraction


def select_top3(candidates: Iterable[Candidate]) -> list[Candidate]:
    """Total deterministic order: perf desc, length asc, discovery asc."""
    ranked = sorted(candidates,
                    key=lambda c: (-c.demo_performance, c.length,
                                   c.discovery_order))
    return ranked[:3]


def _runs_all_tests(program_text: str, tests, registry,
                    wall_per_line, fuel_per_line, summary: EvalSummary):
    try:
        program = parse_program(program_text, registry)
    except ProgramError:
        return [False] * len(tests)
    correct = []
    summary.executions += 1
    for test_input, test_output in tests:
        outcome = execute(program, test_input, registry=registry,
                          wall_per_line=wall_per_line,
                          fuel_per_line=fuel_per_line)
        correct.append(outcome.ok and grids_equal(outcome.output, test_output))
    return correct


def evaluate_pass_at_3(candidates_by_task: dict[str, Sequence[Candidate]],
                       eval_tasks: Sequence[Task], *,
                       registry: Optional[Registry] = None,
                       wall_per_line: Optional[float] = 0.25,
                       fuel_per_line: Optional[int] = 2_000_000) -> EvalSummary:
    """Score each task by its top-3 candidates on all test examples."""
    registry = registry or default_registry()
    summary = EvalSummary(total=len(eval_tasks))
    for task in eval_tasks:
        selected = select_top3(candidates_by_task.get(task.task_id, ()))
        solved = False
        best_correct: tuple[bool, ...] = tuple(False for _ in task.tests)
        for cand in selected:
            correct = _runs_all_tests(cand.program_text, task.tests, registry,
                                      wall_per_line, fuel_per_line, summary)
            if all(correct):
                solved = True
                best_correct = tuple(correct)
                break
            if sum(correct) > sum(best_correct):
                best_correct = tuple(correct)
        summary.verdicts.append(TaskVerdict(
            task_id=task.task_id,
            selected_programs=tuple(c.program_text for c in selected),
            solved=solved,
            per_test_correct=best_correct,
        ))
        summary.solved += int(solved)
    return summary


def expand_per_test_example(tasks: Sequence[Task]) -> list[Task]:
    """One task per test example; 400 public evaluation tasks yield 412."""
    out = []
    for task in tasks:
        for k, test in enumerate(task.tests):
            out.append(Task(task_id=f"{task.task_id}#{k}",
                            demos=task.demos, tests=(test,)))
    return out


def evaluate_eval412(candidates_by_task: dict[str, Sequence[Candidate]],
                     eval_tasks: Sequence[Task], *,
                     registry: Optional[Registry] = None,
                     wall_per_line: Optional[float] = 0.25,
                     fuel_per_line: Optional[int] = 2_000_000) -> EvalSummary:
    """Per-test-example protocol at pass@1: only the top candidate runs."""
    registry = registry or default_registry()
    expanded = expand_per_test_example(eval_tasks)
    summary = EvalSummary(total=len(expanded))
    for unit in expanded:
        base_id = unit.task_id.rsplit("#", 1)[0]
        selected = select_top3(candidates_by_task.get(base_id, ()))[:1]
        solved = False
        correct: tuple[bool, ...] = (False,)
        if selected:
            run = _runs_all_tests(selected[0].program_text, unit.tests,
                                  registry, wall_per_line, fuel_per_line,
                                  summary)
            correct = tuple(run)
            solved = all(run)
        summary.verdicts.append(TaskVerdict(
            task_id=unit.task_id,
            selected_programs=tuple(c.program_text for c in selected),
            solved=solved,
            per_test_correct=correct,
        ))
        summary.solved += int(solved)
    return summary


@dataclass
class SolvedSetComparison:
    only_a: int
    only_b: int
    both: int
    length_pairs: list[tuple[str, int, int]]  # task, shortest in a, shortest in b


def compare_solved_sets(a: dict[str, Sequence[Candidate]],
                        b: dict[str, Sequence[Candidate]],
                        solved_a: set[str], solved_b: set[str]) -> SolvedSetComparison:
    """Set algebra over solved task ids plus shortest-solution length pairs."""
    both = solved_a & solved_b
    pairs = []
    for task_id in sorted(both):
        len_a = min(c.length for c in a[task_id])
        len_b = min(c.length for c in b[task_id])
        pairs.append((task_id, len_a, len_b))
    return SolvedSetComparison(
        only_a=len(solved_a - solved_b),
        only_b=len(solved_b - solved_a),
        both=len(both),
        length_pairs=pairs,
    )


def write_verdicts(summary: EvalSummary, path) -> None:
    """Line-delimited verdict records plus a trailing summary record."""
    with open(path, "w", encoding="utf-8") as fh:
        for v in summary.verdicts:
            fh.write(json.dumps({
                "record": "verdict",
                "task_id": v.task_id,
                "selected": list(v.selected_programs),
                "solved": v.solved,
                "per_test_correct": list(v.per_test_correct),
            }, sort_keys=True) + "\n")
        fh.write(json.dumps({
            "record": "summary",
            "solved": summary.solved,
            "total": summary.total,
        }, sort_keys=True) + "\n")


def write_length_pairs(comparison: SolvedSetComparison, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["task_id", "shortest_a", "shortest_b"])
        for task_id, la, lb in comparison.length_pairs:
            writer.writerow([task_id, la, lb])
