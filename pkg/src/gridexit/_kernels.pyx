# cython: language_level=3
"""Compiled grid kernels; semantic twin of ``_kernels_py``.

Cells and rows are handled as arbitrary Python objects (indexing, slicing,
``==``) so that behavior on degenerate values matches the pure kernels
exactly, including which operations raise; only loop counters are typed.
The zip-based operations (rotations, transposes, hconcat) truncate to the
shortest row like their tuple-expression counterparts. Any change here
must be mirrored in ``_kernels_py``; ``tests/test_kernels.py`` holds the
two implementations equal on regular, ragged, and empty inputs.
"""


def rot90(tuple grid):
    """quarter clockwise rotation"""
    # zip already runs at C speed and encodes the shortest-row truncation
    return tuple(zip(*grid[::-1]))


def rot180(tuple grid):
    """half rotation"""
    cdef Py_ssize_t k
    out = []
    for k in range(len(grid) - 1, -1, -1):
        out.append(grid[k][::-1])
    return tuple(out)


def rot270(tuple grid):
    """quarter anticlockwise rotation"""
    return tuple(tuple(row[::-1]) for row in zip(*grid[::-1]))[::-1]


def hmirror(tuple grid):
    """mirror along the horizontal axis (top-bottom flip)"""
    return grid[::-1]


def vmirror(tuple grid):
    """mirror along the vertical axis (left-right flip)"""
    cdef Py_ssize_t k
    out = []
    for k in range(len(grid)):
        out.append(grid[k][::-1])
    return tuple(out)


def dmirror(tuple grid):
    """mirror along the main diagonal (transpose)"""
    return tuple(zip(*grid))


def cmirror(tuple grid):
    """mirror along the counterdiagonal"""
    return tuple(zip(*(row[::-1] for row in grid[::-1])))


def hconcat(tuple a, tuple b):
    """concatenate two grids left-to-right"""
    cdef Py_ssize_t n = len(a) if len(a) < len(b) else len(b)
    cdef Py_ssize_t k
    out = []
    for k in range(n):
        out.append(a[k] + b[k])
    return tuple(out)


def vconcat(tuple a, tuple b):
    """concatenate two grids top-to-bottom"""
    return a + b


def upscale(tuple grid, factor):
    """scale the grid up by an integer factor in both axes"""
    cdef Py_ssize_t k
    out = []
    for k in range(len(grid)):
        wide = []
        for value in grid[k]:
            for _ in range(factor):
                wide.append(value)
        wide_t = tuple(wide)
        for _ in range(factor):
            out.append(wide_t)
    return tuple(out)


def downscale(tuple grid, factor):
    """keep every factor-th row and column"""
    cdef Py_ssize_t h = len(grid)
    cdef Py_ssize_t w = len(grid[0])
    cdef Py_ssize_t i, j
    kept = []
    for i in range(h):
        row = grid[i]
        cols = []
        for j in range(w):
            if j % factor == 0:  # Python modulo semantics: factor may be <= 0
                cols.append(row[j])
        kept.append(tuple(cols))
    out = []
    for i in range(h):
        if i % factor == 0:
            out.append(kept[i])
    return tuple(out)


def replace(tuple grid, replacee, replacer):
    """substitute one color for another"""
    cdef Py_ssize_t k
    out = []
    for k in range(len(grid)):
        row = []
        for v in grid[k]:
            row.append(replacer if v == replacee else v)
        out.append(tuple(row))
    return tuple(out)


def cellwise(tuple a, tuple b, fallback):
    """keep cells where both grids agree, else fallback"""
    cdef Py_ssize_t h = len(a)
    cdef Py_ssize_t w = len(a[0])
    cdef Py_ssize_t i, j
    out = []
    for i in range(h):
        arow = a[i]
        row = []
        for j in range(w):  # b is only touched per-column, like the reference
            av = arow[j]
            row.append(av if av == b[i][j] else fallback)
        out.append(tuple(row))
    return tuple(out)


def canvas(value, dims):
    """constant grid of the given dimensions"""
    row = tuple(value for _ in range(dims[1]))
    return tuple(row for _ in range(dims[0]))


def compress(tuple grid):
    """drop single-colored rows and columns"""
    cdef Py_ssize_t k, j
    ri = set()
    for k in range(len(grid)):
        if len(set(grid[k])) == 1:
            ri.add(k)
    transposed = dmirror(grid)
    ci = set()
    for k in range(len(transposed)):
        if len(set(transposed[k])) == 1:
            ci.add(k)
    out = []
    for k in range(len(grid)):
        if k in ri:
            continue
        row = grid[k]
        cols = []
        for j in range(len(row)):
            if j not in ci:
                cols.append(row[j])
        out.append(tuple(cols))
    return tuple(out)


def tophalf(tuple grid):
    """top half of the grid, middle row dropped when odd"""
    return grid[:len(grid) // 2]


def bottomhalf(tuple grid):
    """bottom half of the grid, middle row dropped when odd"""
    return grid[len(grid) // 2 + len(grid) % 2:]


def lefthalf(tuple grid):
    """left half of the grid, middle column dropped when odd"""
    return rot270(tophalf(rot90(grid)))


def righthalf(tuple grid):
    """right half of the grid, middle column dropped when odd"""
    return rot270(bottomhalf(rot90(grid)))


def crop(tuple grid, start, dims):
    """subgrid at start of the given dimensions (clipped by slicing)"""
    out = []
    for row in grid[start[0]:start[0] + dims[0]]:
        out.append(row[start[1]:start[1] + dims[1]])
    return tuple(out)


def fill(tuple grid, value, indices):
    """write value at the given indices; out-of-bounds cells are ignored"""
    cdef Py_ssize_t h = len(grid)
    cdef Py_ssize_t w = len(grid[0])
    rows = [list(r) for r in grid]
    for i, j in indices:
        if 0 <= i < h and 0 <= j < w:
            rows[i][j] = value
    return tuple(tuple(r) for r in rows)


def underfill(tuple grid, value, indices, bg):
    """write value at the given indices, but only over background cells"""
    cdef Py_ssize_t h = len(grid)
    cdef Py_ssize_t w = len(grid[0])
    rows = [list(r) for r in grid]
    for i, j in indices:
        if 0 <= i < h and 0 <= j < w and rows[i][j] == bg:
            rows[i][j] = value
    return tuple(tuple(r) for r in rows)


def paint(tuple grid, cells):
    """write colored cells onto the grid; out-of-bounds cells are ignored"""
    cdef Py_ssize_t h = len(grid)
    cdef Py_ssize_t w = len(grid[0])
    rows = [list(r) for r in grid]
    for value, (i, j) in cells:
        if 0 <= i < h and 0 <= j < w:
            rows[i][j] = value
    return tuple(tuple(r) for r in rows)


def ofcolor(tuple grid, value):
    """indices of all cells holding value, scanned row-major"""
    cdef Py_ssize_t i, j
    found = []
    for i in range(len(grid)):
        row = grid[i]
        for j in range(len(row)):
            if row[j] == value:
                found.append((i, j))
    return frozenset(found)


def colorcount_grid(tuple grid, value):
    """number of cells holding value"""
    cdef Py_ssize_t k
    total = 0
    for k in range(len(grid)):
        total += grid[k].count(value)
    return total
