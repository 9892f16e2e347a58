"""Typed program mutation, task evolution, and the mutation baseline step.

A mutation picks a random line and then one of three edits: resample the
whole call against the variable's type (probability phi_var), resample one
argument against its own type (phi_arg), or swap the function for another
with the identical signature, keeping the arguments (phi_func). The line
and branch are drawn once; only the candidate replacement is retried (a
bounded number of times) when it has no candidates or fails to typecheck,
so the branch statistics stay at the configured probabilities. If every
retry dead-ends the original program is returned and flagged unchanged,
keeping the sampler total.

Task evolution repeatedly mutates programs drawn from a population and
keeps a mutant as a new task iff re-executing it on the parent's
demonstration inputs yields valid grids for every example.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .dsl import (Assignment, Program, Registry, print_program,
                  program_ok, term_type, typecheck)
from .grid import Grid
from .interpreter import execute
from .sampling import sample_call, sample_term
from .semantics import default_registry

DEPTH_ONE = "d1"
DEPTH_INF = "dinf"
MUTATION_RETRIES = 8


@dataclass(frozen=True)
class MutationConfig:
    phi_var: float = 0.25
    phi_arg: float = 0.5
    phi_func: float = 0.25
    depth: str = DEPTH_ONE
    num_samples: int = 19_200
    rng_seed: int = 0
    wall_per_line: Optional[float] = 0.25
    fuel_per_line: Optional[int] = 2_000_000

    def __post_init__(self):
        total = self.phi_var + self.phi_arg + self.phi_func
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"branch probabilities sum to {total}, expected 1.0")
        if self.depth not in (DEPTH_ONE, DEPTH_INF):
            raise ValueError(f"depth must be {DEPTH_ONE!r} or {DEPTH_INF!r}")


@dataclass(frozen=True)
class MutationResult:
    program: Program
    branch: Optional[str]  # "var" | "arg" | "func"; None when unchanged
    changed: bool
    attempts: int


@dataclass(frozen=True)
class EvolvedTask:
    program: Program
    examples: tuple[tuple[Grid, Grid], ...]
    parent_task: str
    generation: int


@dataclass
class EvolveStats:
    attempted: int = 0
    kept: int = 0
    dropped_invalid: int = 0
    dropped_unchanged: int = 0


def _scope_before(p: Program, line_index: int, registry: Registry):
    scope = {}
    info = typecheck(p, registry)
    for line in p.lines[:line_index]:
        scope[line.var] = info.var_types[line.var]
    return scope, info


def _draw_replacement(branch: str, line: Assignment, scope, info,
                      rng: random.Random,
                      registry: Registry) -> Optional[Assignment]:
    if branch == "var":
        target_type = info.var_types[line.var]
        drawn = sample_call(scope, registry, rng, ret_type=target_type,
                            attempts=8)
        if drawn is None:
            return None
        primitive, args = drawn
        return Assignment(line.var, primitive.name, args)
    if branch == "arg":
        pos = rng.randrange(len(line.args))
        current_type = term_type(line.args[pos], info.var_types, registry)
        term = sample_term(current_type, scope, registry, rng)
        if term is None:
            return None
        args = line.args[:pos] + (term,) + line.args[pos + 1:]
        return Assignment(line.var, line.func, args)
    primitive = registry.get(line.func)
    same_sig = [q for q in registry
                if q.name != primitive.name
                and q.signature() == primitive.signature()]
    if not same_sig:
        return None
    choice = same_sig[rng.randrange(len(same_sig))]
    return Assignment(line.var, choice.name, line.args)


def mutate_program(p: Program, cfg: MutationConfig, rng: random.Random,
                   registry: Optional[Registry] = None) -> MutationResult:
    """One mutation draw; the result always typechecks."""
    registry = registry or default_registry()
    line_index = rng.randrange(len(p.lines))
    line = p.lines[line_index]
    scope, info = _scope_before(p, line_index, registry)
    roll = rng.random()
    if roll < cfg.phi_var:
        branch = "var"
    elif roll < cfg.phi_var + cfg.phi_arg:
        branch = "arg"
    else:
        branch = "func"
    for attempt in range(1, MUTATION_RETRIES + 1):
        new_line = _draw_replacement(branch, line, scope, info, rng, registry)
        if new_line is None:
            continue
        candidate = Program(p.lines[:line_index] + (new_line,)
                            + p.lines[line_index + 1:])
        if program_ok(candidate, registry):
            return MutationResult(candidate, branch, True, attempt)
    return MutationResult(p, None, False, MUTATION_RETRIES)


def evolve_tasks(seed_tasks: Sequence[tuple[str, Program, Sequence[tuple[Grid, Grid]]]],
                 cfg: MutationConfig, rng: Optional[random.Random] = None,
                 registry: Optional[Registry] = None,
                 stats: Optional[EvolveStats] = None,
                 drop_identity_tasks: bool = False) -> list[EvolvedTask]:
    """Grow a mutated-task population from (task_id, program, examples) seeds.

    Parents come from the seed set at depth d1, or from seeds plus the
    growing population at depth d-infinity. A mutant joins the population
    iff executing it on the parent's demonstration inputs produces a valid
    grid for every example. With `drop_identity_tasks`, mutants whose
    outputs all equal their inputs are additionally discarded.
    """
    from .grid import is_valid_grid

    registry = registry or default_registry()
    rng = rng or random.Random(cfg.rng_seed)
    stats = stats if stats is not None else EvolveStats()

    seeds = [EvolvedTask(program, tuple((i, o) for i, o in examples), task_id, 0)
             for task_id, program, examples in seed_tasks]
    population: list[EvolvedTask] = list(seeds)
    out: list[EvolvedTask] = []

    for _ in range(cfg.num_samples):
        stats.attempted += 1
        source = seeds if cfg.depth == DEPTH_ONE else population
        if not source:
            break
        parent = source[rng.randrange(len(source))]
        result = mutate_program(parent.program, cfg, rng, registry)
        if not result.changed:
            stats.dropped_unchanged += 1
            continue
        examples = []
        valid = True
        for input_grid, _ in parent.examples:
            outcome = execute(result.program, input_grid,
                              registry=registry,
                              wall_per_line=cfg.wall_per_line,
                              fuel_per_line=cfg.fuel_per_line)
            if not outcome.ok or not is_valid_grid(outcome.output):
                valid = False
                break
            examples.append((input_grid, outcome.output))
        if not valid:
            stats.dropped_invalid += 1
            continue
        if drop_identity_tasks and all(i == o for i, o in examples):
            stats.dropped_invalid += 1
            continue
        task = EvolvedTask(result.program, tuple(examples),
                           parent.parent_task, parent.generation + 1)
        population.append(task)
        out.append(task)
        stats.kept += 1
    return out


@dataclass
class BaselineSolution:
    task_id: str
    program_text: str
    match_fraction: float
    meta_iteration: int


def mutation_baseline_step(population: list[EvolvedTask],
                           search_set, cfg: MutationConfig,
                           rng: random.Random, meta_iteration: int,
                           registry: Optional[Registry] = None,
                           n_m: Optional[int] = None):
    """One meta-iteration of the mutation baseline.

    Generates n_m mutants from the population (n_rho * population size by
    default), evaluates every kept mutant against every search-set task's
    demonstrations, and returns (solutions, new_tasks, stats) where
    solutions carry match_fraction = 1.0 records suitable for top-3
    selection. At depth d-infinity the kept mutants are appended to the
    population by the caller via `new_tasks`.
    """
    from .interpreter import run_on_examples

    registry = registry or default_registry()
    samples = n_m if n_m is not None else cfg.num_samples
    step_cfg = MutationConfig(
        phi_var=cfg.phi_var, phi_arg=cfg.phi_arg, phi_func=cfg.phi_func,
        depth=cfg.depth, num_samples=samples, rng_seed=cfg.rng_seed,
        wall_per_line=cfg.wall_per_line, fuel_per_line=cfg.fuel_per_line)
    stats = EvolveStats()
    seeds = [(t.parent_task, t.program, t.examples) for t in population]
    new_tasks = evolve_tasks(seeds, step_cfg, rng, registry, stats)

    solutions: list[BaselineSolution] = []
    for task in new_tasks:
        text = print_program(task.program)
        for search_task in search_set:
            report = run_on_examples(task.program, search_task.demos,
                                     registry=registry,
                                     wall_per_line=cfg.wall_per_line,
                                     fuel_per_line=cfg.fuel_per_line)
            if report.match_fraction == 1.0:
                solutions.append(BaselineSolution(
                    search_task.task_id, text, 1.0, meta_iteration))
    return solutions, new_tasks, stats
