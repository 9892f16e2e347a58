"""Measure sparse-codec text sizes against raw nested-array text.

Walks an ARC-format task directory, encodes every grid both ways, and
reports how often the sparse form is shorter, in characters and in
whitespace tokens. Run as ``python -m gridexit.codec_stats TASK_DIR``.
"""

from __future__ import annotations

import argparse
import json
import sys

from .grid import encode_sparse, raw_text
from .policy import whitespace_token_count
from .taskio import load_task_dir


def measure_dir(directory) -> dict:
    tasks = load_task_dir(directory)
    grids = []
    for task in tasks:
        for i, o in task.demos + task.tests:
            grids.append(i)
            grids.append(o)
    return measure_grids(grids)


def measure_grids(grids) -> dict:
    total = len(grids)
    shorter_chars = 0
    shorter_tokens = 0
    sparse_chars = 0
    raw_chars = 0
    for g in grids:
        sparse = encode_sparse(g)
        raw = raw_text(g)
        sparse_chars += len(sparse)
        raw_chars += len(raw)
        if len(sparse) < len(raw):
            shorter_chars += 1
        if whitespace_token_count(sparse) < whitespace_token_count(raw):
            shorter_tokens += 1
    return {
        "grids": total,
        "sparse_shorter_chars": shorter_chars,
        "sparse_shorter_chars_fraction": shorter_chars / total if total else 0.0,
        "sparse_shorter_tokens": shorter_tokens,
        "sparse_shorter_tokens_fraction": shorter_tokens / total if total else 0.0,
        "sparse_total_chars": sparse_chars,
        "raw_total_chars": raw_chars,
    }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gridexit.codec_stats",
        description="compare sparse codec size to raw nested-array text "
                    "over an ARC task directory")
    parser.add_argument("tasks", help="directory of ARC JSON task files")
    args = parser.parse_args(argv)
    stats = measure_dir(args.tasks)
    json.dump(stats, sys.stdout, indent=2, sort_keys=True)
    print()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
