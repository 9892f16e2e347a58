"""The expert-iteration loop: initialization, sampling and hindsight
relabeling, learning dispatch, and solution tracking.

Each meta-iteration runs one sampling stage (per search task: encode the
demonstrations, draw candidate programs from the policy, execute the valid
ones on the demonstration inputs, relabel and insert into the buffer,
record solution candidates) followed by one learning stage (assemble the
train/augmented/buffer mix and dispatch it to the policy). Test examples
are never executed against sampled programs and never enter the buffer or
training batches.

Determinism: every random draw comes from streams derived from the run
seed and the meta-iteration index, and metrics records contain no wall
times, so two runs with the same seed and a built-in policy emit
byte-identical logs. The buffer log, solution set, and a state file make
interrupted runs resumable.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Callable, Optional, Sequence

from .dsl import Registry, parse_program, print_program
from .interpreter import run_on_examples
from .mutation import (DEPTH_ONE, EvolveStats, EvolvedTask, MutationConfig,
                       evolve_tasks)
from .policy import (EncodingBudget, Policy, PolicyRequest, PolicyTrainingBatch,
                     PolicyUnavailable, classify_samples, dispatch_training,
                     encode_task, truncate_text)
from .replay import (Buffer, Experience, INSERTED, TrainingRecord,
                     assemble_training_mix, relabel_and_insert)
from .semantics import default_registry
from .taskio import SolverArchive, Task


@dataclass(frozen=True)
class AblationFlags:
    no_exit: bool = False         # A1: mutation stream instead of policy samples
    no_relabeling: bool = False   # A2: only perfect experiences enter the buffer
    no_priority: bool = False     # A3: uniform buffer draws in learning
    one_demo: bool = False        # A5: show only one demonstration pair


@dataclass(frozen=True)
class RunConfig:
    n_rho: int = 24
    temperature: float = 0.95
    r_t: int = 10_000
    r_p: int = 90_000
    n_m: int = 19_200
    meta_iterations: int = 100
    epochs: int = 1
    learning_rate: float = 5e-5
    priority_floor: float = 0.1
    wall_per_line: Optional[float] = 0.25
    fuel_per_line: Optional[int] = 2_000_000
    encoder_limit: int = 1024
    decoder_limit: int = 512
    rng_seed: int = 0
    workers: int = 1  # parallel demo executions within a task's samples
    ablation: AblationFlags = field(default_factory=AblationFlags)

    def to_dict(self) -> dict:
        d = asdict(self)
        return d


@dataclass(frozen=True)
class SolutionRecord:
    task_id: str
    program_text: str
    match_fraction: float
    length: int
    meta_iteration: int
    discovery_index: int

    @property
    def perfect(self) -> bool:
        return self.match_fraction == 1.0


class SolutionSet:
    """Per-task solution candidates, deduplicated, immutable once added."""

    def __init__(self):
        self._by_task: dict[str, list[SolutionRecord]] = {}
        self._seen: set[tuple[str, str]] = set()
        self._counter = 0

    def add(self, task_id: str, program_text: str, match_fraction: float,
            meta_iteration: int) -> Optional[SolutionRecord]:
        key = (task_id, program_text)
        if key in self._seen:
            return None
        self._seen.add(key)
        rec = SolutionRecord(task_id, program_text, match_fraction,
                             len(program_text), meta_iteration, self._counter)
        self._counter += 1
        self._by_task.setdefault(task_id, []).append(rec)
        return rec

    def for_task(self, task_id: str) -> list[SolutionRecord]:
        return list(self._by_task.get(task_id, ()))

    def tasks(self) -> list[str]:
        return sorted(self._by_task)

    def solved_tasks(self) -> set[str]:
        return {t for t, recs in self._by_task.items()
                if any(r.perfect for r in recs)}

    def shortest_lengths(self) -> dict[str, int]:
        """Per task, min printed length among perfect solutions."""
        out = {}
        for task_id, recs in self._by_task.items():
            perfect = [r.length for r in recs if r.perfect]
            if perfect:
                out[task_id] = min(perfect)
        return out

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for task_id in sorted(self._by_task):
                for r in self._by_task[task_id]:
                    fh.write(json.dumps({
                        "task_id": r.task_id,
                        "program": r.program_text,
                        "match_fraction": r.match_fraction,
                        "length": r.length,
                        "meta_iteration": r.meta_iteration,
                        "discovery_index": r.discovery_index,
                    }, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "SolutionSet":
        out = cls()
        records = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    records.append(json.loads(line))
        records.sort(key=lambda r: r["discovery_index"])
        for r in records:
            rec = out.add(r["task_id"], r["program"], r["match_fraction"],
                          r["meta_iteration"])
            if rec is not None:
                out._counter = max(out._counter, r["discovery_index"] + 1)
        return out


@dataclass
class StageStats:
    programs_sampled: int = 0
    syntactically_valid: int = 0
    executed: int = 0
    inserted: int = 0
    rejected_duplicate: int = 0
    rejected_invalid: int = 0
    skipped_by_filter: int = 0   # A2 drops of imperfect experiences
    policy_failures: int = 0
    solved_tasks: set = field(default_factory=set)

    def valid_fraction(self) -> float:
        if self.programs_sampled == 0:
            return 0.0
        return self.syntactically_valid / self.programs_sampled


def _experiences_from_archive(archive: SolverArchive,
                              tasks_by_id: dict[str, Task],
                              registry: Registry) -> list[Experience]:
    out = []
    for entry in archive:
        task = tasks_by_id[entry.task_id]
        out.append(Experience(
            program_text=entry.program_text,
            examples=task.demos,
            source_task=entry.task_id,
            match_fraction=1.0,
            meta_iteration=0,
        ))
    return out


def _experiences_from_evolved(tasks: Sequence[EvolvedTask]) -> list[Experience]:
    return [Experience(
        program_text=print_program(t.program),
        examples=t.examples,
        source_task=t.parent_task,
        match_fraction=1.0,
        meta_iteration=0,
    ) for t in tasks]


def initialize(train_archive: Optional[SolverArchive],
               train_tasks: dict[str, Task],
               cfg: RunConfig, *,
               registry: Optional[Registry] = None,
               buffer_log: Optional[str] = None
               ) -> tuple[list[EvolvedTask], Buffer, EvolveStats]:
    """Mutation-based augmentation plus an empty buffer.

    Runs depth-1 task evolution for cfg.n_m samples over the training
    solvers; with n_m = 0 the augmented set is empty and the loop still
    runs (the no-augmentation ablation).
    """
    registry = registry or default_registry()
    stats = EvolveStats()
    augmented: list[EvolvedTask] = []
    if cfg.n_m > 0 and train_archive is not None and len(train_archive) > 0:
        seeds = []
        for entry in train_archive:
            program = parse_program(entry.program_text, registry)
            seeds.append((entry.task_id, program,
                          train_tasks[entry.task_id].demos))
        mcfg = MutationConfig(depth=DEPTH_ONE, num_samples=cfg.n_m,
                              rng_seed=cfg.rng_seed,
                              wall_per_line=cfg.wall_per_line,
                              fuel_per_line=cfg.fuel_per_line)
        rng = random.Random(f"{cfg.rng_seed}|init-evolve")
        augmented = evolve_tasks(seeds, mcfg, rng, registry, stats)
    buffer = Buffer(priority_floor=cfg.priority_floor, log_path=buffer_log)
    return augmented, buffer, stats


def sampling_stage(search_set: Sequence[Task], policy: Policy, buffer: Buffer,
                   cfg: RunConfig, meta_iteration: int,
                   solutions: SolutionSet, *,
                   registry: Optional[Registry] = None,
                   budget: Optional[EncodingBudget] = None) -> StageStats:
    """Policy-driven sampling and hindsight relabeling over the search set.

    Per-task policy failures are retried once, then logged and skipped;
    the stage always completes. Test examples are never executed here.
    """
    registry = registry or default_registry()
    budget = budget or EncodingBudget(encoder_limit=cfg.encoder_limit,
                                      decoder_limit=cfg.decoder_limit)
    stats = StageStats()
    for task in search_set:
        encoded = encode_task(task.demos, budget,
                              one_demo=cfg.ablation.one_demo)
        request = PolicyRequest(task_id=task.task_id, encoded_io=encoded,
                                n_samples=cfg.n_rho,
                                temperature=cfg.temperature)
        texts = None
        for _ in range(2):
            try:
                texts = policy.sample(request)
                break
            except PolicyUnavailable:
                continue
        if texts is None:
            stats.policy_failures += 1
            continue
        classified = classify_samples(texts, registry)
        reports = _run_classified(classified, task, cfg, registry)
        for (text, program, status), report in zip(classified, reports):
            stats.programs_sampled += 1
            if program is None:
                continue
            stats.syntactically_valid += 1
            stats.executed += 1
            if any(o.ok for o in report.per_example):
                rec = solutions.add(task.task_id, print_program(program),
                                    report.match_fraction, meta_iteration)
                if report.match_fraction == 1.0:
                    stats.solved_tasks.add(task.task_id)
            if cfg.ablation.no_relabeling and report.match_fraction < 1.0:
                stats.skipped_by_filter += 1
                continue
            outcome, _ = relabel_and_insert(buffer, program, task, report,
                                            meta_iteration)
            if outcome == INSERTED:
                stats.inserted += 1
            elif outcome.endswith("duplicate"):
                stats.rejected_duplicate += 1
            else:
                stats.rejected_invalid += 1
    return stats


def mutation_sampling_stage(search_set: Sequence[Task],
                            train_population: Sequence[EvolvedTask],
                            buffer: Buffer, cfg: RunConfig,
                            meta_iteration: int, solutions: SolutionSet,
                            rng: random.Random, *,
                            registry: Optional[Registry] = None) -> StageStats:
    """No-policy-feedback variant: the buffer is fed from depth-1 mutants.

    Generates n_rho mutants per population task, assigns each kept mutant
    a uniformly drawn search task, re-executes it on that task's
    demonstration inputs, and relabels as usual.
    """
    registry = registry or default_registry()
    stats = StageStats()
    n_m = cfg.n_rho * max(len(train_population), 1)
    mcfg = MutationConfig(depth=DEPTH_ONE, num_samples=n_m,
                          rng_seed=cfg.rng_seed,
                          wall_per_line=cfg.wall_per_line,
                          fuel_per_line=cfg.fuel_per_line)
    seeds = [(t.parent_task, t.program, t.examples) for t in train_population]
    estats = EvolveStats()
    mutants = evolve_tasks(seeds, mcfg, rng, registry, estats)
    stats.programs_sampled = estats.attempted
    stats.syntactically_valid = estats.attempted - estats.dropped_unchanged
    for mutant in mutants:
        task = search_set[rng.randrange(len(search_set))]
        report = run_on_examples(mutant.program, task.demos, registry=registry,
                                 wall_per_line=cfg.wall_per_line,
                                 fuel_per_line=cfg.fuel_per_line)
        stats.executed += 1
        if any(o.ok for o in report.per_example):
            solutions.add(task.task_id, print_program(mutant.program),
                          report.match_fraction, meta_iteration)
            if report.match_fraction == 1.0:
                stats.solved_tasks.add(task.task_id)
        outcome, _ = relabel_and_insert(buffer, mutant.program, task, report,
                                        meta_iteration)
        if outcome == INSERTED:
            stats.inserted += 1
        elif outcome.endswith("duplicate"):
            stats.rejected_duplicate += 1
        else:
            stats.rejected_invalid += 1
    return stats


def _run_classified(classified, task, cfg: RunConfig, registry):
    """Execute the well-formed candidates; results stay in input order, so
    the worker count never changes the outcome."""
    def run_one(entry):
        _, program, _ = entry
        if program is None:
            return None
        return run_on_examples(program, task.demos, registry=registry,
                               wall_per_line=cfg.wall_per_line,
                               fuel_per_line=cfg.fuel_per_line)

    if cfg.workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(run_one, classified))
    return [run_one(entry) for entry in classified]


@dataclass
class LearnStats:
    batch_size: int = 0
    from_train: int = 0
    from_buffer: int = 0
    redirected_quota: int = 0
    ack: str = "skipped"
    received: int = 0


def learning_stage(buffer: Buffer, train_set: list[Experience],
                   augmented_set: list[Experience], policy: Policy,
                   cfg: RunConfig, rng: random.Random, *,
                   budget: Optional[EncodingBudget] = None,
                   batch_sink: Optional[Callable[[PolicyTrainingBatch], None]] = None
                   ) -> LearnStats:
    """Assemble the r_t/r_p mix and dispatch one training request."""
    budget = budget or EncodingBudget(encoder_limit=cfg.encoder_limit,
                                      decoder_limit=cfg.decoder_limit)
    stats = LearnStats()

    def encode(examples):
        return encode_task(examples, budget, one_demo=cfg.ablation.one_demo)

    records, mix = assemble_training_mix(
        buffer, train_set, augmented_set, cfg.r_t, cfg.r_p, rng, encode,
        buffer_mode="uniform" if cfg.ablation.no_priority else "prioritized",
        concat_all=cfg.ablation.no_exit)
    records = [TrainingRecord(r.io_text,
                              truncate_text(r.program_text, budget.decoder_limit,
                                            budget.length_fn))
               for r in records]
    stats.batch_size = len(records)
    stats.from_train = mix.from_train
    stats.from_buffer = mix.from_buffer
    stats.redirected_quota = mix.redirected_quota

    batch = PolicyTrainingBatch(records=tuple(records), epochs=cfg.epochs,
                                learning_rate=cfg.learning_rate)
    if batch_sink is not None:
        batch_sink(batch)
    try:
        ack = dispatch_training(policy, batch)
    except PolicyUnavailable as exc:
        stats.ack = f"error:{exc}"
        return stats
    stats.ack = ack.get("status", "unsupported")
    stats.received = ack.get("received", 0)
    return stats


@dataclass
class RunResult:
    solutions: SolutionSet
    metrics_path: Path
    out_dir: Path


def _metrics_record(meta_iteration: int, sample_stats: StageStats,
                    learn_stats: LearnStats, buffer: Buffer,
                    solutions: SolutionSet) -> dict:
    return {
        "record": "meta_iteration",
        "meta_iteration": meta_iteration,
        "programs_sampled": sample_stats.programs_sampled,
        "valid_fraction": round(sample_stats.valid_fraction(), 6),
        "inserted": sample_stats.inserted,
        "rejected_duplicate": sample_stats.rejected_duplicate,
        "rejected_invalid": sample_stats.rejected_invalid,
        "skipped_by_filter": sample_stats.skipped_by_filter,
        "policy_failures": sample_stats.policy_failures,
        "buffer_size": len(buffer),
        "policy_solved_iter": len(sample_stats.solved_tasks),
        "cumulative_solved": len(solutions.solved_tasks()),
        "shortest_lengths": dict(sorted(solutions.shortest_lengths().items())),
        "learn": {
            "batch_size": learn_stats.batch_size,
            "from_train": learn_stats.from_train,
            "from_buffer": learn_stats.from_buffer,
            "redirected_quota": learn_stats.redirected_quota,
            "ack": learn_stats.ack,
            "received": learn_stats.received,
        },
    }


def run(cfg: RunConfig, search_set: Sequence[Task], policy: Policy,
        out_dir, *,
        train_archive: Optional[SolverArchive] = None,
        train_tasks: Optional[dict[str, Task]] = None,
        registry: Optional[Registry] = None,
        batch_sink: Optional[Callable[[PolicyTrainingBatch], None]] = None,
        resume: bool = False) -> RunResult:
    """Alternate sampling and learning stages for cfg.meta_iterations.

    Emits one metrics record per meta-iteration plus an initialization
    record to ``metrics.jsonl``; checkpoints the buffer log, solution set,
    config snapshot, and completed-iteration state into ``out_dir``.
    """
    registry = registry or default_registry()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    metrics_path = out_dir / "metrics.jsonl"
    buffer_log = out_dir / "buffer.jsonl"
    solutions_path = out_dir / "solutions.jsonl"
    state_path = out_dir / "state.json"
    train_tasks = train_tasks or {}

    completed = 0
    if resume and state_path.exists():
        completed = json.loads(state_path.read_text())["completed"]

    if resume and completed > 0:
        from .replay import load_buffer_log
        buffer = load_buffer_log(str(buffer_log),
                                 priority_floor=cfg.priority_floor)
        buffer._log_path = str(buffer_log)
        buffer._log_file = open(buffer_log, "a", encoding="utf-8")
        solutions = SolutionSet.load(solutions_path)
        augmented = _reload_augmented(out_dir, registry)
        metrics = open(metrics_path, "a", encoding="utf-8")
    else:
        augmented, buffer, estats = initialize(
            train_archive, train_tasks, cfg,
            registry=registry, buffer_log=str(buffer_log))
        solutions = SolutionSet()
        _save_augmented(out_dir, augmented)
        metrics = open(metrics_path, "w", encoding="utf-8")
        init_record = {
            "record": "init",
            "config": cfg.to_dict(),
            "augmented_kept": estats.kept,
            "augmented_attempted": estats.attempted,
            "augmented_dropped": estats.dropped_invalid + estats.dropped_unchanged,
            "search_tasks": len(search_set),
        }
        metrics.write(json.dumps(init_record, sort_keys=True) + "\n")
        metrics.flush()
    (out_dir / "config.json").write_text(
        json.dumps(cfg.to_dict(), sort_keys=True, indent=2), encoding="utf-8")

    train_set = (_experiences_from_archive(train_archive, train_tasks, registry)
                 if train_archive is not None else [])
    augmented_set = _experiences_from_evolved(augmented)

    try:
        for meta_iteration in range(completed + 1, cfg.meta_iterations + 1):
            if hasattr(policy, "reseed"):
                policy.reseed(meta_iteration)
            if cfg.ablation.no_exit:
                rng = random.Random(f"{cfg.rng_seed}|a1|{meta_iteration}")
                population = _archive_population(train_archive, train_tasks,
                                                 registry)
                sample_stats = mutation_sampling_stage(
                    search_set, population, buffer, cfg, meta_iteration,
                    solutions, rng, registry=registry)
            else:
                sample_stats = sampling_stage(
                    search_set, policy, buffer, cfg, meta_iteration,
                    solutions, registry=registry)
            learn_rng = random.Random(f"{cfg.rng_seed}|learn|{meta_iteration}")
            learn_stats = learning_stage(
                buffer, train_set, augmented_set, policy, cfg, learn_rng,
                batch_sink=batch_sink)
            record = _metrics_record(meta_iteration, sample_stats, learn_stats,
                                     buffer, solutions)
            metrics.write(json.dumps(record, sort_keys=True) + "\n")
            metrics.flush()
            solutions.save(solutions_path)
            state_path.write_text(json.dumps({"completed": meta_iteration}))
    finally:
        metrics.close()
        buffer.close()
    return RunResult(solutions=solutions, metrics_path=metrics_path,
                     out_dir=out_dir)


def _archive_population(train_archive, train_tasks, registry):
    if train_archive is None:
        return []
    out = []
    for entry in train_archive:
        program = parse_program(entry.program_text, registry)
        out.append(EvolvedTask(program, train_tasks[entry.task_id].demos,
                               entry.task_id, 0))
    return out


def _save_augmented(out_dir: Path, augmented: list[EvolvedTask]) -> None:
    from .taskio import save_evolved
    save_evolved(augmented, out_dir / "augmented.jsonl")


def _reload_augmented(out_dir: Path, registry) -> list[EvolvedTask]:
    from .taskio import load_evolved
    path = out_dir / "augmented.jsonl"
    if not path.exists():
        return []
    return load_evolved(path, registry)
