"""Typed mutation, task evolution, and the mutation baseline."""

import random

import pytest

from gridexit.dsl import parse_program, print_program, program_ok, typecheck
from gridexit.grid import is_valid_grid
from gridexit.interpreter import execute
from gridexit.mutation import (DEPTH_INF, DEPTH_ONE, EvolveStats,
                               MutationConfig, evolve_tasks, mutate_program,
                               mutation_baseline_step)

from golden_programs import GOLDEN


def test_probabilities_must_sum_to_one():
    with pytest.raises(ValueError):
        MutationConfig(phi_var=0.5, phi_arg=0.5, phi_func=0.5)


def test_mutants_always_typecheck(registry):
    rng = random.Random("closure")
    cfg = MutationConfig(num_samples=0)
    programs = [parse_program(text, registry) for _, text, _ in GOLDEN]
    for _ in range(2000):
        p = programs[rng.randrange(len(programs))]
        result = mutate_program(p, cfg, rng, registry)
        assert program_ok(result.program, registry)


def test_branch_distribution_smoke(registry):
    rng = random.Random("branches")
    cfg = MutationConfig(num_samples=0)
    p = parse_program(GOLDEN[0][1], registry)  # every line has alternatives
    counts = {"var": 0, "arg": 0, "func": 0}
    n = 6000
    for _ in range(n):
        result = mutate_program(p, cfg, rng, registry)
        assert result.changed
        counts[result.branch] += 1
    assert abs(counts["var"] / n - 0.25) < 0.03
    assert abs(counts["arg"] / n - 0.50) < 0.03
    assert abs(counts["func"] / n - 0.25) < 0.03


def test_single_line_func_branch(registry):
    cfg = MutationConfig(phi_var=0.0, phi_arg=0.0, phi_func=1.0)
    p = parse_program("O = rot90(I)", registry)
    rng = random.Random(5)
    grid_to_grid = {q.name for q in registry
                    if q.signature() == registry.get("rot90").signature()}
    for _ in range(50):
        result = mutate_program(p, cfg, rng, registry)
        assert result.changed and result.branch == "func"
        assert len(result.program) == 1
        assert result.program.lines[0].func in grid_to_grid - {"rot90"}
        assert result.program.lines[0].args == p.lines[0].args


def test_no_candidates_returns_flagged_original(registry):
    # paint and asobject have unique signatures: the func branch dead-ends
    cfg = MutationConfig(phi_var=0.0, phi_arg=0.0, phi_func=1.0)
    p = parse_program("x1 = asobject(I)\nO = paint(I, x1)", registry)
    result = mutate_program(p, cfg, rng=random.Random(1), registry=registry)
    assert not result.changed
    assert result.branch is None
    assert result.program == p


def test_var_branch_respects_variable_type(registry):
    cfg = MutationConfig(phi_var=1.0, phi_arg=0.0, phi_func=0.0)
    p = parse_program("x1 = ofcolor(I, THREE)\nO = fill(I, ONE, x1)", registry)
    rng = random.Random(11)
    for _ in range(100):
        result = mutate_program(p, cfg, rng, registry)
        info = typecheck(result.program, registry)
        assert program_ok(result.program, registry)


def _seed_tasks(registry, toy_suite):
    tasks, solvers = toy_suite
    by_id = {t.task_id: t for t in tasks}
    return [(entry.task_id, parse_program(entry.program_text, registry),
             by_id[entry.task_id].demos) for entry in solvers]


class TestEvolve:
    def test_kept_tasks_reproduce_their_examples(self, registry, toy_suite):
        seeds = _seed_tasks(registry, toy_suite)
        cfg = MutationConfig(num_samples=300, rng_seed=5)
        evolved = evolve_tasks(seeds, cfg, random.Random(5), registry)
        assert evolved
        for task in evolved:
            for inp, out in task.examples:
                assert is_valid_grid(out)
                outcome = execute(task.program, inp, wall_per_line=None)
                assert outcome.ok and outcome.output == out

    def test_depth_one_generation_bound(self, registry, toy_suite):
        seeds = _seed_tasks(registry, toy_suite)
        cfg = MutationConfig(depth=DEPTH_ONE, num_samples=400, rng_seed=1)
        for task in evolve_tasks(seeds, cfg, random.Random(1), registry):
            assert task.generation == 1

    def test_depth_infinity_grows_ancestry(self, registry, toy_suite):
        seeds = _seed_tasks(registry, toy_suite)
        cfg = MutationConfig(depth=DEPTH_INF, num_samples=2500, rng_seed=2)
        generations = {t.generation
                       for t in evolve_tasks(seeds, cfg, random.Random(2),
                                             registry)}
        assert max(generations) > 1

    def test_reproducible_under_fixed_seed(self, registry, toy_suite):
        seeds = _seed_tasks(registry, toy_suite)
        cfg = MutationConfig(num_samples=200, rng_seed=9)
        runs = []
        for _ in range(2):
            evolved = evolve_tasks(seeds, cfg, random.Random("evo|9"), registry)
            runs.append([(print_program(t.program), t.parent_task, t.examples)
                         for t in evolved])
        assert runs[0] == runs[1]

    def test_stats_account_for_every_sample(self, registry, toy_suite):
        seeds = _seed_tasks(registry, toy_suite)
        cfg = MutationConfig(num_samples=250, rng_seed=3)
        stats = EvolveStats()
        kept = evolve_tasks(seeds, cfg, random.Random(3), registry, stats)
        assert stats.attempted == 250
        assert stats.kept == len(kept)
        assert stats.kept + stats.dropped_invalid + stats.dropped_unchanged \
            == stats.attempted

    def test_identity_filter_flag(self, registry, toy_suite):
        seeds = _seed_tasks(registry, toy_suite)
        cfg = MutationConfig(num_samples=400, rng_seed=4)
        filtered = evolve_tasks(seeds, cfg, random.Random(4), registry,
                                drop_identity_tasks=True)
        for task in filtered:
            assert any(i != o for i, o in task.examples)


class TestBaselineStep:
    def test_default_sample_budget_formula(self):
        # n_m = n_rho * population size at the published scale
        assert 24 * 400 == 9_600

    def test_reseeded_population_resolves_own_tasks(self, registry, toy_suite):
        tasks, solvers = toy_suite
        from gridexit.mutation import EvolvedTask
        by_id = {t.task_id: t for t in tasks}
        population = [
            EvolvedTask(parse_program(e.program_text, registry),
                        by_id[e.task_id].demos, e.task_id, 0)
            for e in solvers
        ]
        cfg = MutationConfig(depth=DEPTH_ONE, num_samples=0, rng_seed=0)
        solutions, new_tasks, stats = mutation_baseline_step(
            population, tasks, cfg, random.Random("bl|0"), 1, registry,
            n_m=24 * len(population))
        assert stats.attempted == 120
        solved = {s.task_id for s in solutions}
        assert len(solved) >= 3  # identity-preserving mutations are common
