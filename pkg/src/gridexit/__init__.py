"""Expert-iteration engine for programming-by-examples on color-grid tasks.

Executes a typed grid DSL, generates candidate programs via pluggable
policies and typed mutation, stores every valid program as a
hindsight-relabeled experience in a prioritized replay buffer, and scores
solutions under top-3 selection by demonstration performance.
"""

from .dsl import Program, parse_program, print_program, typecheck
from .grid import decode_sparse, encode_sparse, grids_equal, is_valid_grid
from .interpreter import ExecOutcome, RunReport, execute, run_on_examples
from .semantics import default_registry

__version__ = "0.1.0"

__all__ = [
    "Program", "parse_program", "print_program", "typecheck",
    "decode_sparse", "encode_sparse", "grids_equal", "is_valid_grid",
    "ExecOutcome", "RunReport", "execute", "run_on_examples",
    "default_registry", "__version__",
]
