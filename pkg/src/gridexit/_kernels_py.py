"""Pure-Python grid kernels.

These are the order-insensitive hot operations of the DSL: every function
here maps tuples of row tuples (plus scalars / index iterables) to new
tuples, with no dependence on set iteration order. A compiled twin of this
module (`gridexit._kernels`, built from ``_kernels.pyx``) provides the same
functions; `gridexit.kernels` picks one at import time.

Degenerate inputs (empty or ragged grids) are legal intermediate values and
must behave exactly like the naive tuple expressions: ``zip``-based kernels
truncate to the shortest row, index-based kernels read ``len(grid[0])``.
Keep the two implementations in lockstep; `tests/test_kernels.py` compares
them cell-for-cell.
"""

from __future__ import annotations


def rot90(grid):
    """quarter clockwise rotation"""
    return tuple(zip(*grid[::-1]))


def rot180(grid):
    """half rotation"""
    return tuple(tuple(row[::-1]) for row in grid[::-1])


def rot270(grid):
    """quarter anticlockwise rotation"""
    return tuple(tuple(row[::-1]) for row in zip(*grid[::-1]))[::-1]


def hmirror(grid):
    """mirror along the horizontal axis (top-bottom flip)"""
    return grid[::-1]


def vmirror(grid):
    """mirror along the vertical axis (left-right flip)"""
    return tuple(row[::-1] for row in grid)


def dmirror(grid):
    """mirror along the main diagonal (transpose)"""
    return tuple(zip(*grid))


def cmirror(grid):
    """mirror along the counterdiagonal"""
    return tuple(zip(*(row[::-1] for row in grid[::-1])))


def hconcat(a, b):
    """concatenate two grids left-to-right"""
    return tuple(i + j for i, j in zip(a, b))


def vconcat(a, b):
    """concatenate two grids top-to-bottom"""
    return a + b


def upscale(grid, factor):
    """scale the grid up by an integer factor in both axes"""
    out = []
    for row in grid:
        wide = tuple(value for value in row for _ in range(factor))
        out.extend(wide for _ in range(factor))
    return tuple(out)


def downscale(grid, factor):
    """keep every factor-th row and column"""
    h = len(grid)
    w = len(grid[0])
    kept_cols = tuple(tuple(grid[i][j] for j in range(w) if j % factor == 0)
                      for i in range(h))
    return tuple(kept_cols[i] for i in range(h) if i % factor == 0)


def replace(grid, replacee, replacer):
    """substitute one color for another"""
    return tuple(tuple(replacer if v == replacee else v for v in row) for row in grid)


def cellwise(a, b, fallback):
    """keep cells where both grids agree, else fallback"""
    h = len(a)
    w = len(a[0])
    return tuple(
        tuple(a[i][j] if a[i][j] == b[i][j] else fallback for j in range(w))
        for i in range(h)
    )


def canvas(value, dims):
    """constant grid of the given dimensions"""
    return tuple(tuple(value for _ in range(dims[1])) for _ in range(dims[0]))


def compress(grid):
    """drop single-colored rows and columns"""
    ri = tuple(i for i, row in enumerate(grid) if len(set(row)) == 1)
    ci = tuple(j for j, col in enumerate(dmirror(grid)) if len(set(col)) == 1)
    return tuple(
        tuple(v for j, v in enumerate(row) if j not in ci)
        for i, row in enumerate(grid) if i not in ri
    )


def tophalf(grid):
    """top half of the grid, middle row dropped when odd"""
    return grid[:len(grid) // 2]


def bottomhalf(grid):
    """bottom half of the grid, middle row dropped when odd"""
    return grid[len(grid) // 2 + len(grid) % 2:]


# Defined by rotation so that ragged intermediates truncate the same way
# the rotation kernels do.
def lefthalf(grid):
    """left half of the grid, middle column dropped when odd"""
    return rot270(tophalf(rot90(grid)))


def righthalf(grid):
    """right half of the grid, middle column dropped when odd"""
    return rot270(bottomhalf(rot90(grid)))


def crop(grid, start, dims):
    """subgrid at start of the given dimensions (clipped by slicing)"""
    return tuple(row[start[1]:start[1] + dims[1]]
                 for row in grid[start[0]:start[0] + dims[0]])


def fill(grid, value, indices):
    """write value at the given indices; out-of-bounds cells are ignored"""
    h = len(grid)
    w = len(grid[0])
    rows = [list(row) for row in grid]
    for i, j in indices:
        if 0 <= i < h and 0 <= j < w:
            rows[i][j] = value
    return tuple(tuple(row) for row in rows)


def underfill(grid, value, indices, bg):
    """write value at the given indices, but only over background cells"""
    h = len(grid)
    w = len(grid[0])
    rows = [list(row) for row in grid]
    for i, j in indices:
        if 0 <= i < h and 0 <= j < w and rows[i][j] == bg:
            rows[i][j] = value
    return tuple(tuple(row) for row in rows)


def paint(grid, cells):
    """write colored cells onto the grid; out-of-bounds cells are ignored"""
    h = len(grid)
    w = len(grid[0])
    rows = [list(row) for row in grid]
    for value, (i, j) in cells:
        if 0 <= i < h and 0 <= j < w:
            rows[i][j] = value
    return tuple(tuple(row) for row in rows)


def ofcolor(grid, value):
    """indices of all cells holding value, scanned row-major"""
    return frozenset((i, j) for i, row in enumerate(grid)
                     for j, v in enumerate(row) if v == value)


def colorcount_grid(grid, value):
    """number of cells holding value"""
    return sum(row.count(value) for row in grid)
