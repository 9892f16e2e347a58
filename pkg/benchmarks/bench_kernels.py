"""Benchmark the compiled kernel extension against the pure-Python kernels.

Two workloads:
  * microbenchmarks per kernel on realistic task grids
  * end-to-end program execution (the published width-quadrupler and a
    batch of randomly sampled typed programs), with the backend forced
    through the kernels module

Run: python benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import random
import statistics
import sys
import time

from gridexit import _kernels_py as pure
from gridexit import kernels


def _grids(rng, n=200, max_side=25):
    out = []
    for _ in range(n):
        h, w = rng.randint(3, max_side), rng.randint(3, max_side)
        out.append(tuple(tuple(rng.randrange(10) for _ in range(w))
                         for _ in range(h)))
    return out


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        started = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - started)
    return best


def bench_kernels(repeat):
    rng = random.Random("bench")
    grids = _grids(rng)
    pairs = list(zip(grids, grids[1:] + grids[:1]))
    idx = [frozenset((rng.randrange(25), rng.randrange(25))
                     for _ in range(40)) for _ in range(len(grids))]

    cases = {
        "rot90": lambda mod: [mod.rot90(g) for g in grids],
        "vmirror": lambda mod: [mod.vmirror(g) for g in grids],
        "dmirror": lambda mod: [mod.dmirror(g) for g in grids],
        "hconcat": lambda mod: [mod.hconcat(a, b) for a, b in pairs],
        "replace": lambda mod: [mod.replace(g, 3, 7) for g in grids],
        "compress": lambda mod: [mod.compress(g) for g in grids],
        "upscale": lambda mod: [mod.upscale(g, 2) for g in grids],
        "ofcolor": lambda mod: [mod.ofcolor(g, 5) for g in grids],
        "cellwise": lambda mod: [mod.cellwise(g, g, 0) for g in grids],
        "fill": lambda mod: [mod.fill(g, 4, s)
                             for g, s in zip(grids, idx)],
    }
    rows = []
    for name, work in cases.items():
        t_pure = _time(lambda: work(pure), repeat)
        t_comp = _time(lambda: work(kernels.compiled), repeat)
        rows.append((name, t_pure, t_comp, t_pure / t_comp))
    return rows


def bench_programs(repeat):
    """Whole-program execution with each backend selected via environment."""
    import subprocess

    script = r"""
import random, sys, time
from gridexit import kernels
from gridexit.dsl import parse_program
from gridexit.interpreter import execute
from gridexit.sampling import random_program
from gridexit.semantics import default_registry
from gridexit.dsl import print_program

reg = default_registry()
rng = random.Random("bench-programs")
grids = [tuple(tuple(rng.randrange(10) for _ in range(rng.randint(5, 25)))
               for _ in range(rng.randint(5, 25))) for _ in range(50)]
programs = [random_program(reg, rng, stop_probability=0.6)
            for _ in range(300)]
quadrupler = parse_program(
    "x1 = vmirror(I)\nx2 = hconcat(x1, I)\nO = hconcat(x2, x2)", reg)

started = time.perf_counter()
for p in programs:
    for g in grids[:4]:
        execute(p, g, wall_per_line=None, fuel_per_line=2_000_000)
for g in grids:
    for _ in range(50):
        execute(quadrupler, g, wall_per_line=None)
print(f"{kernels.ACTIVE} {time.perf_counter() - started:.4f}")
"""
    results = {}
    for env_value, label in (("0", "compiled"), ("1", "pure")):
        best = float("inf")
        for _ in range(repeat):
            proc = subprocess.run(
                [sys.executable, "-c", script],
                capture_output=True, text=True,
                env={"GRIDEXIT_PURE": env_value, "PATH": "/usr/bin:/bin"},
            )
            if proc.returncode != 0:
                raise RuntimeError(proc.stderr[-500:])
            backend, elapsed = proc.stdout.split()
            assert backend == label, (backend, label)
            best = min(best, float(elapsed))
        results[label] = best
    return results


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if kernels.compiled is None:
        print("compiled kernels are not built; run "
              "`python setup.py build_ext --inplace` first", file=sys.stderr)
        return 1

    print(f"active backend: {kernels.ACTIVE}\n")
    print(f"{'kernel':<12} {'pure (s)':>10} {'compiled (s)':>13} {'speedup':>8}")
    rows = bench_kernels(args.repeat)
    for name, t_pure, t_comp, speedup in rows:
        print(f"{name:<12} {t_pure:>10.5f} {t_comp:>13.5f} {speedup:>7.2f}x")
    geo = statistics.geometric_mean([r[3] for r in rows])
    print(f"{'geomean':<12} {'':>10} {'':>13} {geo:>7.2f}x\n")

    results = bench_programs(args.repeat)
    speedup = results["pure"] / results["compiled"]
    print("whole-program execution (300 sampled programs + tiling batch):")
    print(f"  pure     {results['pure']:.4f} s")
    print(f"  compiled {results['compiled']:.4f} s  ({speedup:.2f}x)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
