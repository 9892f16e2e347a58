"""Type-directed sampling of terms, calls, and whole programs.

The term pool for a type contains the input symbol and in-scope variables
whose type unifies with it, the DSL constants of that type, and, for
function types only, primitive references with a unifying signature.
Variables of statically unknown (ANY) type are only eligible where ANY is
expected, which keeps sampled programs within the typed fragment whose
runtime behavior is pinned down.

All draws go through a caller-supplied `random.Random`, so sampling is
reproducible and splittable by seeding per worker.
"""

from __future__ import annotations

import random
from typing import Optional

from .dsl import (ANY, CONSTANTS, GRID, Assignment, DslType, Program,
                  Registry, Term, TypeInfo, const, prim, term_type, typecheck,
                  unifies, var)
from .dsl import INPUT


def _is_pure_any(t: DslType) -> bool:
    return t.tag == "ANY" and t.alts is None


def _eligible(want: DslType, got: DslType) -> bool:
    if _is_pure_any(want):
        return True
    if _is_pure_any(got):
        return False
    return unifies(want, got)


def term_pool(want: DslType, scope: dict[str, DslType],
              registry: Registry) -> list[Term]:
    """Deterministically ordered candidate terms for a parameter type."""
    pool: list[Term] = []
    if _eligible(want, GRID):
        pool.append(INPUT)
    for name in scope:  # insertion order = definition order
        if _eligible(want, scope[name]):
            pool.append(var(name))
    for name, (_, ctype) in CONSTANTS.items():
        if _eligible(want, ctype):
            pool.append(const(name))
    if want.tag == "FUNCTION" or (want.alts and any(a.tag == "FUNCTION"
                                                    for a in want.alts)):
        for p in registry:
            if unifies(want, p.function_type()):
                pool.append(prim(p.name))
    return pool


def sample_term(want: DslType, scope: dict[str, DslType],
                registry: Registry, rng: random.Random) -> Optional[Term]:
    pool = term_pool(want, scope, registry)
    if not pool:
        return None
    return pool[rng.randrange(len(pool))]


def sample_args(primitive, scope: dict[str, DslType], registry: Registry,
                rng: random.Random) -> Optional[tuple[Term, ...]]:
    args = []
    for want in primitive.params:
        term = sample_term(want, scope, registry, rng)
        if term is None:
            return None
        args.append(term)
    return tuple(args)


def sample_call(scope: dict[str, DslType], registry: Registry,
                rng: random.Random, *,
                ret_type: Optional[DslType] = None,
                attempts: int = 64):
    """Sample (primitive, args) with type-correct arguments.

    With `ret_type` set, primitives are drawn among those whose declared
    return type unifies with it, as the mutation procedure requires;
    otherwise uniformly over the registry. Returns None if every attempt
    dead-ends (some parameter had an empty pool).
    """
    if ret_type is None:
        candidates = tuple(registry)
    else:
        candidates = registry.with_return_type(ret_type)
    if not candidates:
        return None
    for _ in range(attempts):
        primitive = candidates[rng.randrange(len(candidates))]
        args = sample_args(primitive, scope, registry, rng)
        if args is not None:
            return primitive, args
    return None


def random_program(registry: Registry, rng: random.Random, *,
                   stop_probability: float = 0.8,
                   max_lines: int = 256) -> Program:
    """Sample a whole typed program line by line.

    Each line draws a primitive uniformly and samples type-correct
    arguments; whenever a line produces a grid, the program ends there
    with the given probability (the grid variable is renamed to O), so the
    number of grid-producing lines is geometric. The result always
    typechecks.
    """
    scope: dict[str, DslType] = {}
    lines: list[Assignment] = []
    while True:
        drawn = sample_call(scope, registry, rng)
        if drawn is None:  # cannot happen with the default registry
            raise RuntimeError("no feasible line found")
        primitive, args = drawn
        arg_types = tuple(term_type(t, scope, registry) for t in args)
        result_type = primitive.result_type(arg_types)
        name = f"x{len(lines) + 1}"
        lines.append(Assignment(name, primitive.name, args))
        scope[name] = result_type
        if result_type.tag == "GRID":
            if rng.random() < stop_probability or len(lines) >= max_lines:
                last = lines.pop()
                lines.append(Assignment("O", last.func, last.args))
                return Program(tuple(lines))
        if len(lines) >= max_lines * 4:
            raise RuntimeError("sampler failed to terminate")


def program_types(p: Program, registry: Registry) -> TypeInfo:
    return typecheck(p, registry)
