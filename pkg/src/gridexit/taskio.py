"""Loading and saving tasks, solver archives, and evolved-task populations.

Tasks use the public ARC JSON schema: ``{"train": [{"input": [[...]],
"output": [[...]]}, ...], "test": [...]}``, one file per task, the file
stem as the task id. Solver archives are JSONL records ``{"task_id": ...,
"program": ...}`` with the examples kept separately as ARC JSON, which
keeps program diffs readable; archives are validated on save and load
(every program must parse, typecheck, and reproduce its task's
demonstrations).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .dsl import Program, Registry, parse_program, print_program
from .grid import Grid, freeze_grid, is_valid_grid, to_lists
from .interpreter import run_on_examples
from .mutation import EvolvedTask
from .semantics import default_registry


class TaskFormatError(ValueError):
    pass


class ArchiveError(ValueError):
    pass


@dataclass(frozen=True)
class Task:
    task_id: str
    demos: tuple[tuple[Grid, Grid], ...]
    tests: tuple[tuple[Grid, Grid], ...]


@dataclass(frozen=True)
class SolverEntry:
    task_id: str
    program_text: str


@dataclass(frozen=True)
class SolverArchive:
    entries: tuple[SolverEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def _parse_pairs(section, label: str, path) -> tuple:
    if not isinstance(section, list) or not section:
        raise TaskFormatError(f"{path}: section {label!r} is missing or empty")
    pairs = []
    for k, ex in enumerate(section):
        if not isinstance(ex, dict) or "input" not in ex or "output" not in ex:
            raise TaskFormatError(f"{path}: {label}[{k}] lacks input/output")
        inp = freeze_grid(ex["input"])
        out = freeze_grid(ex["output"])
        for name, g in (("input", inp), ("output", out)):
            if not is_valid_grid(g):
                raise TaskFormatError(
                    f"{path}: {label}[{k}].{name} is not a valid grid")
        pairs.append((inp, out))
    return tuple(pairs)


def load_task(path) -> Task:
    """Read one ARC JSON task file; validates every grid."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise TaskFormatError(f"{path}: malformed JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise TaskFormatError(f"{path}: top level must be an object")
    demos = _parse_pairs(raw.get("train"), "train", path)
    tests = _parse_pairs(raw.get("test"), "test", path)
    return Task(task_id=path.stem, demos=demos, tests=tests)


def load_task_dir(directory) -> list[Task]:
    """All *.json tasks in a directory, sorted by task id."""
    directory = Path(directory)
    paths = sorted(directory.glob("*.json"))
    if not paths:
        raise TaskFormatError(f"{directory}: no task files found")
    return [load_task(p) for p in paths]


def save_task(task: Task, directory) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    payload = {
        "train": [{"input": to_lists(i), "output": to_lists(o)}
                  for i, o in task.demos],
        "test": [{"input": to_lists(i), "output": to_lists(o)}
                 for i, o in task.tests],
    }
    path = directory / f"{task.task_id}.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# Solver archives

def _validate_entry(entry: SolverEntry, task: Task, registry: Registry,
                    fuel_per_line: Optional[int] = 2_000_000) -> Program:
    try:
        program = parse_program(entry.program_text, registry)
    except Exception as exc:
        raise ArchiveError(f"{entry.task_id}: program does not parse: {exc}") from exc
    report = run_on_examples(program, task.demos, registry=registry,
                             wall_per_line=None, fuel_per_line=fuel_per_line)
    if report.match_fraction != 1.0:
        raise ArchiveError(
            f"{entry.task_id}: program reproduces only "
            f"{report.match_fraction:.0%} of its demonstrations")
    return program


def save_archive(entries: Iterable[SolverEntry], path, tasks_by_id: dict[str, Task],
                 registry: Optional[Registry] = None,
                 validate: bool = True) -> None:
    registry = registry or default_registry()
    entries = list(entries)
    if validate:
        for entry in entries:
            if entry.task_id not in tasks_by_id:
                raise ArchiveError(f"{entry.task_id}: no task with this id")
            _validate_entry(entry, tasks_by_id[entry.task_id], registry)
    with open(path, "w", encoding="utf-8") as fh:
        for entry in entries:
            fh.write(json.dumps({"task_id": entry.task_id,
                                 "program": entry.program_text},
                                sort_keys=True) + "\n")


def load_archive(path, tasks_by_id: Optional[dict[str, Task]] = None,
                 registry: Optional[Registry] = None,
                 validate: bool = True) -> SolverArchive:
    registry = registry or default_registry()
    entries = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                entry = SolverEntry(rec["task_id"], rec["program"])
            except (json.JSONDecodeError, KeyError) as exc:
                raise ArchiveError(f"{path}:{n}: malformed record ({exc})") from exc
            entries.append(entry)
    if validate and tasks_by_id is not None:
        for entry in entries:
            if entry.task_id not in tasks_by_id:
                raise ArchiveError(f"{entry.task_id}: no task with this id")
            _validate_entry(entry, tasks_by_id[entry.task_id], registry)
    return SolverArchive(tuple(entries))


def program_line_count(text: str) -> int:
    return sum(1 for ln in text.splitlines() if ln.strip())


def split_train_valid(archive: SolverArchive, rng_seed: int = 0
                      ) -> tuple[SolverArchive, SolverArchive]:
    """Stratified 80/20 split by solver line count.

    Per stratum, round-half-up of 80% goes to train (computed exactly as
    (8n + 5) // 10), membership drawn by a seeded shuffle; single-member
    strata therefore land in train. Deterministic under a fixed seed.
    """
    strata: dict[int, list[SolverEntry]] = {}
    for entry in archive.entries:
        strata.setdefault(program_line_count(entry.program_text), []).append(entry)
    rng = random.Random(f"split|{rng_seed}")
    train: list[SolverEntry] = []
    valid: list[SolverEntry] = []
    for line_count in sorted(strata):
        members = sorted(strata[line_count], key=lambda e: e.task_id)
        rng.shuffle(members)
        n_train = (8 * len(members) + 5) // 10
        train.extend(members[:n_train])
        valid.extend(members[n_train:])
    train.sort(key=lambda e: e.task_id)
    valid.sort(key=lambda e: e.task_id)
    return SolverArchive(tuple(train)), SolverArchive(tuple(valid))


# ---------------------------------------------------------------------------
# Evolved-population persistence

def save_evolved(tasks: Iterable[EvolvedTask], path) -> None:
    """Write an evolved population as JSONL (program + inline examples)."""
    with open(path, "w", encoding="utf-8") as fh:
        for k, task in enumerate(tasks):
            fh.write(json.dumps({
                "task_id": f"{task.parent_task}_m{k:05d}",
                "parent_task": task.parent_task,
                "generation": task.generation,
                "program": print_program(task.program),
                "examples": [{"input": to_lists(i), "output": to_lists(o)}
                             for i, o in task.examples],
            }, sort_keys=True) + "\n")


def load_evolved(path, registry: Optional[Registry] = None) -> list[EvolvedTask]:
    registry = registry or default_registry()
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            out.append(EvolvedTask(
                program=parse_program(rec["program"], registry),
                examples=tuple((freeze_grid(x["input"]), freeze_grid(x["output"]))
                               for x in rec["examples"]),
                parent_task=rec["parent_task"],
                generation=rec["generation"],
            ))
    return out
