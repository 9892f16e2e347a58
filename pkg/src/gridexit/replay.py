"""Hindsight-relabeled, prioritized experience buffer.

Every syntactically valid program that executed cleanly on a task's
demonstration inputs becomes an experience: the program, the inputs, and
the outputs it actually produced (not the task's targets). The fraction of
true demonstration outputs it happened to reproduce is kept as its match
fraction, and sampling weight is ``epsilon + match_fraction`` so that
experiences which solve real tasks are preferred while pure hindsight
experiences remain reachable.

The buffer is append-only with deduplication on (canonical program text,
source task); an optional log file records one JSON line per insertion so
runs can be resumed.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Callable, Optional

from .dsl import Program, Registry, parse_program, print_program
from .grid import Grid, decode_sparse, encode_sparse
from .interpreter import RunReport

DEFAULT_EPSILON = 0.1

INSERTED = "inserted"
REJECTED_INVALID = "rejected:invalid"
REJECTED_DUPLICATE = "rejected:duplicate"


@dataclass(frozen=True)
class Experience:
    program_text: str
    examples: tuple[tuple[Grid, Grid], ...]  # (input, realized output)
    source_task: str
    match_fraction: float
    meta_iteration: int

    def key(self) -> tuple[str, str]:
        return (self.program_text, self.source_task)


class EmptyBufferError(RuntimeError):
    pass


class Buffer:
    """Append-only experience store with priority sampling."""

    def __init__(self, priority_floor: float = DEFAULT_EPSILON,
                 log_path: Optional[str] = None):
        if priority_floor < 0:
            raise ValueError("priority floor must be >= 0")
        self.priority_floor = priority_floor
        self.entries: list[Experience] = []
        self._index: set[tuple[str, str]] = set()
        self._log_path = log_path
        self._log_file = open(log_path, "a", encoding="utf-8") if log_path else None

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def close(self) -> None:
        if self._log_file is not None:
            self._log_file.close()
            self._log_file = None

    def insert(self, e: Experience) -> str:
        if e.key() in self._index:
            return REJECTED_DUPLICATE
        self.entries.append(e)
        self._index.add(e.key())
        if self._log_file is not None:
            self._log_file.write(experience_to_json(e) + "\n")
            self._log_file.flush()
        return INSERTED


def priority_of(e: Experience, epsilon: float = DEFAULT_EPSILON) -> float:
    """Sampling weight: epsilon + match fraction, strictly positive for
    epsilon > 0 so hindsight-only experiences stay sampleable."""
    return epsilon + e.match_fraction


def relabel_and_insert(buf: Buffer, p: Program, task,
                       run: RunReport, meta_iteration: int) -> tuple[str, Optional[Experience]]:
    """Store the program with the outputs it realized on `task`'s demos.

    `task` provides `task_id` and `demos`; `run` must be the report of
    executing `p` on exactly those demonstration examples. Rejects when
    any execution failed (timeout, fault, or invalid output) or when the
    (program, task) pair is already stored; match_fraction is kept as
    scored against the true targets, not the relabeled outputs.
    """
    if not run.all_ok:
        return REJECTED_INVALID, None
    text = print_program(p)
    exp = Experience(
        program_text=text,
        examples=tuple((inp, out.output)
                       for (inp, _), out in zip(task.demos, run.per_example)),
        source_task=task.task_id,
        match_fraction=run.match_fraction,
        meta_iteration=meta_iteration,
    )
    status = buf.insert(exp)
    return status, (exp if status == INSERTED else None)


def sample_batch(buf: Buffer, n: int, mode: str,
                 rng: random.Random) -> list[Experience]:
    """Draw n experiences with replacement, prioritized or uniform."""
    if len(buf) == 0:
        raise EmptyBufferError("cannot sample from an empty buffer")
    if mode not in ("prioritized", "uniform"):
        raise ValueError(f"unknown sampling mode {mode!r}")
    if mode == "uniform":
        return [buf.entries[rng.randrange(len(buf.entries))] for _ in range(n)]
    weights = [priority_of(e, buf.priority_floor) for e in buf.entries]
    total = sum(weights)
    if total <= 0:
        raise EmptyBufferError("all priorities are zero; nothing is sampleable")
    return rng.choices(buf.entries, weights=weights, k=n)


@dataclass(frozen=True)
class TrainingRecord:
    io_text: str
    program_text: str


@dataclass
class MixStats:
    from_train: int = 0
    from_buffer: int = 0
    redirected_quota: int = 0  # buffer quota redirected when buffer empty


def assemble_training_mix(buf: Optional[Buffer],
                          train_set: list[Experience],
                          augmented_set: list[Experience],
                          r_t: int, r_p: int, rng: random.Random,
                          encode: Callable[[tuple], str],
                          *, buffer_mode: str = "prioritized",
                          concat_all: bool = False) -> tuple[list[TrainingRecord], MixStats]:
    """Build the learning-stage batch of r_t + r_p records.

    Draws r_t experiences from the concatenated train and augmented sets
    and r_p from the buffer (with replacement; sources smaller than their
    quota are oversampled). With `concat_all`, all r_t + r_p draws come
    uniformly from the concatenation of train, augmented, and buffer. An
    empty buffer redirects its quota to the train sources and flags it.
    The batch is returned in randomized order.
    """
    stats = MixStats()
    supervised = list(train_set) + list(augmented_set)
    records: list[Experience] = []

    if concat_all:
        pool = supervised + (list(buf.entries) if buf is not None else [])
        if not pool:
            raise EmptyBufferError("no data sources to assemble a batch from")
        for _ in range(r_t + r_p):
            records.append(pool[rng.randrange(len(pool))])
        stats.from_train = r_t + r_p
    else:
        buffer_quota = r_p
        train_quota = r_t
        if (buf is None or len(buf) == 0) and r_p > 0:
            stats.redirected_quota = r_p
            train_quota += r_p
            buffer_quota = 0
        if train_quota > 0 and not supervised:
            if buf is None or len(buf) == 0:
                raise EmptyBufferError("no data sources to assemble a batch from")
            buffer_quota += train_quota  # degenerate: only the buffer has data
            train_quota = 0
        for _ in range(train_quota):
            records.append(supervised[rng.randrange(len(supervised))])
        stats.from_train = train_quota
        if buffer_quota > 0:
            records.extend(sample_batch(buf, buffer_quota, buffer_mode, rng))
            stats.from_buffer = buffer_quota

    out = [TrainingRecord(encode(e.examples), e.program_text) for e in records]
    rng.shuffle(out)
    return out, stats


# ---------------------------------------------------------------------------
# Buffer log persistence

def experience_to_json(e: Experience) -> str:
    return json.dumps({
        "meta_iteration": e.meta_iteration,
        "source_task": e.source_task,
        "match_fraction": e.match_fraction,
        "program": e.program_text,
        "examples": [{"input": encode_sparse(i), "output": encode_sparse(o)}
                     for i, o in e.examples],
    }, sort_keys=True, separators=(",", ":"))


def experience_from_json(line: str) -> Experience:
    rec = json.loads(line)
    return Experience(
        program_text=rec["program"],
        examples=tuple((decode_sparse(x["input"]), decode_sparse(x["output"]))
                       for x in rec["examples"]),
        source_task=rec["source_task"],
        match_fraction=rec["match_fraction"],
        meta_iteration=rec["meta_iteration"],
    )


def load_buffer_log(path: str, priority_floor: float = DEFAULT_EPSILON) -> Buffer:
    buf = Buffer(priority_floor=priority_floor)
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                buf.insert(experience_from_json(line))
    return buf


def audit_hindsight(buf: Buffer, registry: Registry, *,
                    fuel_per_line: Optional[int] = 2_000_000) -> list[str]:
    """Re-execute every stored experience; return descriptions of violations.

    An empty result certifies the hindsight invariant: stored outputs are
    exactly what the stored program produces on the stored inputs.
    """
    from .interpreter import execute

    problems = []
    for e in buf.entries:
        program = parse_program(e.program_text, registry)
        for k, (inp, expected) in enumerate(e.examples):
            outcome = execute(program, inp, registry=registry,
                              wall_per_line=None, fuel_per_line=fuel_per_line)
            if not outcome.ok or outcome.output != expected:
                problems.append(
                    f"{e.source_task}: example {k} does not reproduce "
                    f"({outcome.status})")
    return problems
