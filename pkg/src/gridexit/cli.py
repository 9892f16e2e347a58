"""Operator command line.

Verbs: ``evolve`` (build an augmented train set), ``baseline`` (random or
mutation search baselines), ``run`` (the full expert-iteration loop against
a policy endpoint), ``eval`` (score a solution set), ``compare`` (diff two
solution sets), ``exec`` (run one program on one task), ``dsl-doc`` (emit
the primitive reference). Machine-readable output goes to files or stdout;
human summaries go to stderr. Every command is deterministic given --seed
and its inputs when used with built-in policies.

A config file holds flat ``key = value`` lines (hash comments allowed);
command-line flags override file values, and the effective configuration
is snapshotted into the output directory.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import evaluation as ev
from .dsl import dsl_reference, parse_program
from .exitloop import AblationFlags, RunConfig, SolutionSet, run
from .interpreter import execute
from .mutation import (DEPTH_INF, DEPTH_ONE, MutationConfig, evolve_tasks,
                       mutation_baseline_step, EvolvedTask)
from .policy import RandomPolicy, open_policy
from .semantics import default_registry
from .taskio import (load_archive, load_task, load_task_dir,
                     save_evolved)


def _eprint(*args) -> None:
    print(*args, file=sys.stderr)


def load_config_file(path) -> dict:
    """Flat key = value lines; '#' starts a comment; values parsed as JSON
    when possible, else kept as strings."""
    out = {}
    for n, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{n}: expected 'key = value'")
        key, _, value = line.partition("=")
        value = value.strip()
        try:
            out[key.strip()] = json.loads(value)
        except json.JSONDecodeError:
            out[key.strip()] = value
    return out


def build_run_config(args) -> RunConfig:
    values: dict = {}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    overrides = {
        "n_rho": getattr(args, "n_rho", None),
        "meta_iterations": getattr(args, "meta_iters", None),
        "rng_seed": getattr(args, "seed", None),
        "r_t": getattr(args, "r_t", None),
        "r_p": getattr(args, "r_p", None),
        "n_m": getattr(args, "n_m", None),
        "fuel_per_line": getattr(args, "fuel_per_line", None),
        "workers": getattr(args, "workers", None),
    }
    for key, value in overrides.items():
        if value is not None:
            values[key] = value
    ablations = set(getattr(args, "ablation", None) or ())
    values["ablation"] = AblationFlags(
        no_exit="no-exit" in ablations,
        no_relabeling="no-relabeling" in ablations,
        no_priority="no-priority" in ablations,
        one_demo="one-demo" in ablations,
    )
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return RunConfig(**values)


def _load_archive_with_tasks(archive_path, tasks_dir, registry):
    tasks = {t.task_id: t for t in load_task_dir(tasks_dir)}
    archive = load_archive(archive_path, tasks, registry)
    return archive, tasks


def _candidates_from_solutions(path):
    solutions = SolutionSet.load(path)
    by_task = {}
    for task_id in solutions.tasks():
        by_task[task_id] = [
            ev.Candidate(r.program_text, r.match_fraction, r.length,
                         r.discovery_index)
            for r in solutions.for_task(task_id)
        ]
    return by_task, solutions


# ---------------------------------------------------------------------------
# Verbs

def cmd_evolve(args) -> int:
    registry = default_registry()
    archive, tasks = _load_archive_with_tasks(args.archive, args.tasks, registry)
    seeds = [(e.task_id, parse_program(e.program_text, registry),
              tasks[e.task_id].demos) for e in archive]
    cfg = MutationConfig(depth=DEPTH_INF if args.depth == "dinf" else DEPTH_ONE,
                         num_samples=args.samples, rng_seed=args.seed)
    rng = random.Random(f"{args.seed}|evolve")
    from .mutation import EvolveStats
    stats = EvolveStats()
    evolved = evolve_tasks(seeds, cfg, rng, registry, stats)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_evolved(evolved, out_dir / "augmented.jsonl")
    _eprint(f"kept {stats.kept} of {stats.attempted} mutants "
            f"({stats.dropped_invalid} invalid, "
            f"{stats.dropped_unchanged} unchanged)")
    return 0


def cmd_baseline(args) -> int:
    registry = default_registry()
    search_set = load_task_dir(args.search_set)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    solutions = SolutionSet()
    metrics_path = out_dir / "metrics.jsonl"

    if args.mode == "random":
        policy = RandomPolicy(seed=args.seed, registry=registry)
        n_m = args.samples_per_iter or (args.n_rho * len(search_set))
        with open(metrics_path, "w", encoding="utf-8") as metrics:
            for meta_iter in range(1, args.meta_iters + 1):
                rng = random.Random(f"{args.seed}|baseline|{meta_iter}")
                solved_now = _random_baseline_iter(
                    policy, search_set, solutions, rng, n_m, meta_iter,
                    registry, args.fuel_per_line)
                metrics.write(json.dumps({
                    "record": "meta_iteration", "meta_iteration": meta_iter,
                    "programs_sampled": n_m,
                    "policy_solved_iter": len(solved_now),
                    "cumulative_solved": len(solutions.solved_tasks()),
                }, sort_keys=True) + "\n")
    else:
        depth = DEPTH_ONE if args.mode == "d1" else DEPTH_INF
        archive, tasks = _load_archive_with_tasks(args.archive, args.tasks,
                                                  registry)
        population = [
            EvolvedTask(parse_program(e.program_text, registry),
                        tasks[e.task_id].demos, e.task_id, 0)
            for e in archive
        ]
        initial = list(population)
        cfg = MutationConfig(depth=depth, num_samples=0, rng_seed=args.seed,
                             fuel_per_line=args.fuel_per_line)
        n_m = args.samples_per_iter or (args.n_rho * len(initial))
        with open(metrics_path, "w", encoding="utf-8") as metrics:
            for meta_iter in range(1, args.meta_iters + 1):
                rng = random.Random(f"{args.seed}|baseline|{meta_iter}")
                source = initial if depth == DEPTH_ONE else population
                found, new_tasks, stats = mutation_baseline_step(
                    source, search_set, cfg, rng, meta_iter, registry, n_m=n_m)
                if depth == DEPTH_INF:
                    population.extend(new_tasks)
                solved_now = set()
                for sol in found:
                    solutions.add(sol.task_id, sol.program_text,
                                  sol.match_fraction, meta_iter)
                    solved_now.add(sol.task_id)
                metrics.write(json.dumps({
                    "record": "meta_iteration", "meta_iteration": meta_iter,
                    "programs_sampled": stats.attempted,
                    "mutants_kept": stats.kept,
                    "policy_solved_iter": len(solved_now),
                    "cumulative_solved": len(solutions.solved_tasks()),
                }, sort_keys=True) + "\n")

    solutions.save(out_dir / "solutions.jsonl")
    _eprint(f"solved {len(solutions.solved_tasks())} of {len(search_set)} tasks")
    return 0


def _random_baseline_iter(policy, search_set, solutions, rng, n_m, meta_iter,
                          registry, fuel_per_line):
    """Sample n_m unconditioned programs; evaluate each on every task."""
    from .interpreter import run_on_examples
    solved_now = set()
    for _ in range(n_m):
        text = policy.sample_one(rng)
        program = parse_program(text, registry)
        for task in search_set:
            report = run_on_examples(program, task.demos, registry=registry,
                                     wall_per_line=None,
                                     fuel_per_line=fuel_per_line)
            if any(o.ok for o in report.per_example) \
                    and report.match_fraction == 1.0:
                solutions.add(task.task_id, text, 1.0, meta_iter)
                solved_now.add(task.task_id)
    return solved_now


def cmd_run(args) -> int:
    registry = default_registry()
    if args.workers is None:
        import os
        args.workers = os.cpu_count() or 1
    cfg = build_run_config(args)
    search_set = load_task_dir(args.search_set)
    archive = None
    tasks = {}
    if args.archive:
        archive, tasks = _load_archive_with_tasks(args.archive, args.tasks,
                                                  registry)
    policy = open_policy(args.policy_endpoint, seed=cfg.rng_seed,
                         registry=registry)
    try:
        result = run(cfg, search_set, policy, args.out_dir,
                     train_archive=archive, train_tasks=tasks,
                     registry=registry, resume=args.resume)
    finally:
        policy.close()
    _eprint(f"run complete: {len(result.solutions.solved_tasks())} tasks "
            f"with perfect-demo solutions; metrics at {result.metrics_path}")
    return 0


def cmd_eval(args) -> int:
    registry = default_registry()
    eval_tasks = load_task_dir(args.tasks)
    by_task, _ = _candidates_from_solutions(args.solutions)
    if args.protocol == "pass3":
        summary = ev.evaluate_pass_at_3(by_task, eval_tasks, registry=registry)
    else:
        summary = ev.evaluate_eval412(by_task, eval_tasks, registry=registry)
    if args.out:
        ev.write_verdicts(summary, args.out)
    print(json.dumps({"protocol": args.protocol, "solved": summary.solved,
                      "total": summary.total}, sort_keys=True))
    return 0


def cmd_compare(args) -> int:
    registry = default_registry()
    eval_tasks = load_task_dir(args.tasks)
    by_a, _ = _candidates_from_solutions(args.a)
    by_b, _ = _candidates_from_solutions(args.b)
    sum_a = ev.evaluate_pass_at_3(by_a, eval_tasks, registry=registry)
    sum_b = ev.evaluate_pass_at_3(by_b, eval_tasks, registry=registry)
    solved_a = {v.task_id for v in sum_a.verdicts if v.solved}
    solved_b = {v.task_id for v in sum_b.verdicts if v.solved}
    comparison = ev.compare_solved_sets(by_a, by_b, solved_a, solved_b)
    if args.lengths:
        ev.write_length_pairs(comparison, args.lengths)
    print(json.dumps({"only_a": comparison.only_a, "only_b": comparison.only_b,
                      "both": comparison.both}, sort_keys=True))
    return 0


def cmd_exec(args) -> int:
    registry = default_registry()
    program = parse_program(Path(args.program).read_text(encoding="utf-8"),
                            registry)
    task = load_task(args.task)
    for k, (inp, target) in enumerate(task.demos):
        outcome = execute(program, inp, registry=registry)
        matched = outcome.ok and outcome.output == target
        print(json.dumps({
            "example": k, "status": outcome.status, "matches_target": matched,
            "output": [list(r) for r in outcome.output] if outcome.ok else None,
        }, sort_keys=True))
    return 0


def cmd_dsl_doc(_args) -> int:
    print(dsl_reference(default_registry()))
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridexit",
        description="expert-iteration engine for programming-by-examples "
                    "on color-grid tasks")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("evolve", help="build an augmented train set by mutation")
    p.add_argument("--archive", required=True)
    p.add_argument("--tasks", required=True)
    p.add_argument("--samples", type=int, default=19_200)
    p.add_argument("--depth", choices=["d1", "dinf"], default="d1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(fn=cmd_evolve)

    p = sub.add_parser("baseline", help="run a search baseline")
    p.add_argument("--mode", choices=["random", "d1", "dinf"], required=True)
    p.add_argument("--search-set", required=True)
    p.add_argument("--archive", help="solver archive (mutation modes)")
    p.add_argument("--tasks", help="task dir for the archive (mutation modes)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--meta-iters", type=int, default=1)
    p.add_argument("--n-rho", type=int, default=24)
    p.add_argument("--samples-per-iter", type=int,
                   help="override n_m (defaults to n_rho * population size)")
    p.add_argument("--fuel-per-line", type=int, default=2_000_000)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(fn=cmd_baseline)

    p = sub.add_parser("run", help="run the expert-iteration loop")
    p.add_argument("--config")
    p.add_argument("--search-set", required=True)
    p.add_argument("--archive")
    p.add_argument("--tasks")
    p.add_argument("--policy-endpoint", default="builtin:random",
                   help="builtin:random, stdio:<command>, or tcp:<host:port>")
    p.add_argument("--seed", type=int)
    p.add_argument("--meta-iters", type=int)
    p.add_argument("--n-rho", type=int)
    p.add_argument("--r-t", type=int, dest="r_t")
    p.add_argument("--r-p", type=int, dest="r_p")
    p.add_argument("--n-m", type=int, dest="n_m")
    p.add_argument("--fuel-per-line", type=int, dest="fuel_per_line")
    p.add_argument("--ablation", action="append",
                   choices=["no-exit", "no-relabeling", "no-priority",
                            "one-demo"])
    p.add_argument("--workers", type=int, default=None,
                   help="bound on parallel program executions "
                        "(default: available parallelism)")
    p.add_argument("--resume", action="store_true")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("eval", help="score a solution set")
    p.add_argument("--protocol", choices=["pass3", "eval412"], default="pass3")
    p.add_argument("--solutions", required=True)
    p.add_argument("--tasks", required=True)
    p.add_argument("--out", help="verdict report path (JSONL)")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("compare", help="diff two solution sets")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--tasks", required=True)
    p.add_argument("--lengths", help="CSV of shortest-length pairs")
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("exec", help="run one program on one task")
    p.add_argument("--program", required=True)
    p.add_argument("--task", required=True)
    p.set_defaults(fn=cmd_exec)

    p = sub.add_parser("dsl-doc", help="emit the primitive reference")
    p.set_defaults(fn=cmd_dsl_doc)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except (ValueError, OSError) as exc:
        _eprint(f"error: {exc}")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
