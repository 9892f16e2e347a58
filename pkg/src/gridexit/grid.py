"""Grid values, validity rules, and the sparse object-centric text codec.

A grid is an immutable tuple of row tuples of color codes. Valid task grids
are rectangular, between 1x1 and 30x30, with every cell in 0..9; program
execution may produce other shapes, which the validity predicate rejects.

The sparse codec renders a grid as a header ``RxC bg=B`` followed by one
group per non-background color, listing that color's cells as ``[row,col]``
coordinates in row-major order. The background color is the most frequent
one (lowest color wins ties) and its cells are omitted, which is what makes
the encoding short on mostly-background grids.

Codec grammar (normative, single spaces as separators)::

    <R>x<C> bg=<B>( <c>:(\\[<x>,<y>\\])+)*
"""

from __future__ import annotations

from typing import Any, Iterable

Grid = tuple  # tuple[tuple[int, ...], ...]

MAX_SIDE = 30
NUM_COLORS = 10


class CodecError(ValueError):
    """Malformed sparse grid text; `pos` is the character offset."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


def is_valid_grid(value: Any) -> bool:
    """True iff value is a rectangular 1..30 x 1..30 matrix of colors 0..9.

    Total predicate: accepts arbitrary execution results. Bools are not
    colors even though they compare equal to 0/1.
    """
    if not isinstance(value, (tuple, list)):
        return False
    rows = len(value)
    if not 1 <= rows <= MAX_SIDE:
        return False
    first = value[0]
    if not isinstance(first, (tuple, list)):
        return False
    cols = len(first)
    if not 1 <= cols <= MAX_SIDE:
        return False
    for row in value:
        if not isinstance(row, (tuple, list)) or len(row) != cols:
            return False
        for cell in row:
            if type(cell) is not int or not 0 <= cell < NUM_COLORS:
                return False
    return True


def freeze_grid(rows: Iterable[Iterable[int]]) -> Grid:
    """Copy nested sequences into the canonical tuple-of-tuples form."""
    return tuple(tuple(row) for row in rows)


def to_lists(g: Grid) -> list:
    return [list(row) for row in g]


def grids_equal(a: Grid, b: Grid) -> bool:
    """Same dimensions and cellwise equal."""
    return a == b


def raw_text(g: Grid) -> str:
    """Compact nested-array rendering, e.g. ``[[1,2],[3,4]]``.

    Only used to compare text sizes against the sparse codec.
    """
    return "[" + ",".join("[" + ",".join(str(v) for v in row) + "]" for row in g) + "]"


def _background(g: Grid) -> int:
    counts = [0] * NUM_COLORS
    for row in g:
        for v in row:
            counts[v] += 1
    best = max(counts)
    return counts.index(best)  # lowest color wins ties


def encode_sparse(g: Grid) -> str:
    """Render a valid grid in the sparse codec."""
    if not is_valid_grid(g):
        raise ValueError("encode_sparse requires a valid grid")
    bg = _background(g)
    by_color: dict[int, list[tuple[int, int]]] = {}
    for i, row in enumerate(g):
        for j, v in enumerate(row):
            if v != bg:
                by_color.setdefault(v, []).append((i, j))
    parts = [f"{len(g)}x{len(g[0])} bg={bg}"]
    for color in sorted(by_color):
        cells = "".join(f"[{i},{j}]" for i, j in by_color[color])
        parts.append(f"{color}:{cells}")
    return " ".join(parts)


def decode_sparse(text: str) -> Grid:
    """Parse sparse codec text back into a grid.

    Raises CodecError on malformed headers, out-of-bounds coordinates, or
    duplicate cell assignments; `decode_sparse(encode_sparse(g)) == g` for
    every valid grid.
    """
    tokens: list[tuple[str, int]] = []
    offset = 0
    for tok in text.split(" "):
        if tok == "":
            raise CodecError("empty token (double or trailing space?)", offset)
        tokens.append((tok, offset))
        offset += len(tok) + 1
    if len(tokens) < 2:
        raise CodecError("missing header", 0)

    dims, dims_pos = tokens[0]
    if "x" not in dims:
        raise CodecError("malformed dimensions, expected RxC", dims_pos)
    r_text, _, c_text = dims.partition("x")
    if not r_text.isdigit() or not c_text.isdigit():
        raise CodecError("malformed dimensions, expected RxC", dims_pos)
    rows, cols = int(r_text), int(c_text)
    if not (1 <= rows <= MAX_SIDE and 1 <= cols <= MAX_SIDE):
        raise CodecError(f"dimensions {rows}x{cols} out of range", dims_pos)

    bg_tok, bg_pos = tokens[1]
    if not bg_tok.startswith("bg=") or not bg_tok[3:].isdigit():
        raise CodecError("malformed background, expected bg=<color>", bg_pos)
    bg = int(bg_tok[3:])
    if bg >= NUM_COLORS:
        raise CodecError(f"background color {bg} out of range", bg_pos)

    cells = [[bg] * cols for _ in range(rows)]
    seen: set[tuple[int, int]] = set()
    for group, group_pos in tokens[2:]:
        color_text, sep, body = group.partition(":")
        if not sep or not color_text.isdigit():
            raise CodecError("malformed color group, expected <c>:[x,y]...", group_pos)
        color = int(color_text)
        if color >= NUM_COLORS:
            raise CodecError(f"color {color} out of range", group_pos)
        if body == "":
            raise CodecError("color group lists no cells", group_pos)
        pos = group_pos + len(color_text) + 1
        while body:
            if not body.startswith("["):
                raise CodecError("expected [x,y]", pos)
            end = body.find("]")
            if end == -1:
                raise CodecError("unterminated coordinate", pos)
            coord = body[1:end]
            x_text, sep2, y_text = coord.partition(",")
            if not sep2 or not x_text.isdigit() or not y_text.isdigit():
                raise CodecError("malformed coordinate, expected [x,y]", pos)
            x, y = int(x_text), int(y_text)
            if x >= rows:
                raise CodecError(f"row {x} out of bounds for {rows} rows", pos)
            if y >= cols:
                raise CodecError(f"col {y} out of bounds for {cols} cols", pos)
            if (x, y) in seen:
                raise CodecError(f"cell [{x},{y}] assigned twice", pos)
            seen.add((x, y))
            cells[x][y] = color
            body = body[end + 1:]
            pos += end + 1
    return tuple(tuple(row) for row in cells)
