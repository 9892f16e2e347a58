"""Executable semantics for the DSL primitives and the default registry.

Value universe: grids are tuples of row tuples; objects are frozensets of
``(color, (i, j))`` cells; index sets are frozensets of ``(i, j)`` pairs;
scalars are ints, bools, and int pairs; functions are `FuncValue` wrappers.

Two constraints shape this module:

* Set-valued results must be built with the same construction order the
  canonical open-source semantics use, because consumers like ``first`` and
  tie-breaking ``argmax`` depend on set layout. Where a result is a set,
  the comprehension/BFS structure is therefore kept operation-for-operation
  equivalent rather than rewritten.
* Every primitive charges the active execution budget in proportion to the
  work ahead, *before* materializing large values (see `limits`).

Grid-shaped results are delegated to `kernels`, which may be compiled.
"""

from __future__ import annotations

from functools import lru_cache

from . import dsl as D
from . import kernels as K
from .limits import charge


class FuncValue:
    """First-class function value with a known arity."""

    __slots__ = ("fn", "arity", "name")

    def __init__(self, fn, arity: int, name: str = "<fn>"):
        self.fn = fn
        self.arity = arity
        self.name = name

    def __call__(self, *args):
        from . import limits
        limits.enter_call()
        try:
            return self.fn(*args)
        finally:
            limits.exit_call()

    def __repr__(self):
        return f"<fn {self.name}/{self.arity}>"


def _gcells(g) -> int:
    # charge estimator only; must never raise on odd-shaped values
    try:
        return len(g) * len(g[0]) if len(g) else 0
    except TypeError:
        return 1


def _sized(c) -> int:
    try:
        return len(c)
    except TypeError:
        return 1


def _is_grid_like(v) -> bool:
    return isinstance(v, tuple)


# --- shared patch/element helpers (order-sensitive; keep shapes as-is) -----

def _toindices(patch):
    if len(patch) == 0:
        return frozenset()
    if isinstance(next(iter(patch))[1], tuple):
        return frozenset(index for _, index in patch)
    return patch


def _ulcorner(patch):
    return tuple(map(min, zip(*_toindices(patch))))


def _lrcorner(patch):
    return tuple(map(max, zip(*_toindices(patch))))


def _uppermost(patch):
    return min(i for i, _ in _toindices(patch))


def _lowermost(patch):
    return max(i for i, _ in _toindices(patch))


def _leftmost(patch):
    return min(j for _, j in _toindices(patch))


def _rightmost(patch):
    return max(j for _, j in _toindices(patch))


def _height(piece):
    if len(piece) == 0:
        return 0
    if isinstance(piece, tuple):
        return len(piece)
    return _lowermost(piece) - _uppermost(piece) + 1


def _width(piece):
    if len(piece) == 0:
        return 0
    if isinstance(piece, tuple):
        return len(piece[0])
    return _rightmost(piece) - _leftmost(piece) + 1


def _values(element):
    if isinstance(element, tuple):
        return [v for row in element for v in row]
    return [v for v, _ in element]


def _mostcolor(element):
    values = _values(element)
    return max(set(values), key=values.count)


def _asindices(grid):
    return frozenset((i, j) for i in range(len(grid)) for j in range(len(grid[0])))


def _dneighbors(loc):
    return frozenset({(loc[0] - 1, loc[1]), (loc[0] + 1, loc[1]),
                      (loc[0], loc[1] - 1), (loc[0], loc[1] + 1)})


def _ineighbors(loc):
    return frozenset({(loc[0] - 1, loc[1] - 1), (loc[0] - 1, loc[1] + 1),
                      (loc[0] + 1, loc[1] - 1), (loc[0] + 1, loc[1] + 1)})


def _neighbors(loc):
    return _dneighbors(loc) | _ineighbors(loc)


def _merge(containers):
    charge(sum(_sized(c) for c in containers))
    return type(containers)(e for c in containers for e in c)


def _extent_charge(patch):
    idx = _toindices(patch)
    if len(idx) == 0:
        return idx, 0, 0, 0, 0
    si, sj = _ulcorner(idx)
    ei, ej = _lrcorner(idx)
    return idx, si, sj, ei, ej


# --- geometry --------------------------------------------------------------

def p_vmirror(piece):
    """mirror along the vertical axis (left-right flip)"""
    if isinstance(piece, tuple):
        charge(_gcells(piece))
        return K.vmirror(piece)
    charge(_sized(piece))
    d = _ulcorner(piece)[1] + _lrcorner(piece)[1]
    if isinstance(next(iter(piece))[1], tuple):
        return frozenset((v, (i, d - j)) for v, (i, j) in piece)
    return frozenset((i, d - j) for i, j in piece)


def p_hmirror(piece):
    """mirror along the horizontal axis (top-bottom flip)"""
    if isinstance(piece, tuple):
        charge(_gcells(piece))
        return K.hmirror(piece)
    charge(_sized(piece))
    d = _ulcorner(piece)[0] + _lrcorner(piece)[0]
    if isinstance(next(iter(piece))[1], tuple):
        return frozenset((v, (d - i, j)) for v, (i, j) in piece)
    return frozenset((d - i, j) for i, j in piece)


def p_dmirror(piece):
    """mirror along the main diagonal"""
    if isinstance(piece, tuple):
        charge(_gcells(piece))
        return K.dmirror(piece)
    charge(_sized(piece))
    a, b = _ulcorner(piece)
    if isinstance(next(iter(piece))[1], tuple):
        return frozenset((v, (j - b + a, i - a + b)) for v, (i, j) in piece)
    return frozenset((j - b + a, i - a + b) for i, j in piece)


def p_cmirror(piece):
    """mirror along the counterdiagonal"""
    if isinstance(piece, tuple):
        charge(_gcells(piece))
        return K.cmirror(piece)
    charge(_sized(piece))
    return p_vmirror(p_dmirror(p_vmirror(piece)))


def p_rot90(grid):
    """quarter clockwise rotation"""
    charge(_gcells(grid))
    return K.rot90(grid)


def p_rot180(grid):
    """half rotation"""
    charge(_gcells(grid))
    return K.rot180(grid)


def p_rot270(grid):
    """quarter anticlockwise rotation"""
    charge(_gcells(grid))
    return K.rot270(grid)


def p_hconcat(a, b):
    """concatenate two grids left-to-right"""
    charge(_gcells(a) + _gcells(b))
    if isinstance(a, tuple) and isinstance(b, tuple):
        return K.hconcat(a, b)
    return tuple(i + j for i, j in zip(a, b))


def p_vconcat(a, b):
    """concatenate two grids top-to-bottom"""
    charge(_gcells(a) + _gcells(b))
    return K.vconcat(a, b)


def p_upscale(element, factor):
    """scale a grid or object up by an integer factor"""
    f = factor if isinstance(factor, int) and factor > 0 else 0
    if isinstance(element, tuple):
        charge(_gcells(element) * f * f)
        return K.upscale(element, factor)
    charge(_sized(element) * f * f)
    if len(element) == 0:
        return frozenset()
    di_inv, dj_inv = _ulcorner(element)
    normed = p_shift(element, (-di_inv, -dj_inv))
    out = set()
    for value, (i, j) in normed:
        for io in range(factor):
            for jo in range(factor):
                out.add((value, (i * factor + io, j * factor + jo)))
    return p_shift(frozenset(out), (di_inv, dj_inv))


def p_downscale(grid, factor):
    """keep every factor-th row and column"""
    charge(_gcells(grid))
    return K.downscale(grid, factor)


def p_compress(grid):
    """drop single-colored rows and columns"""
    charge(_gcells(grid) * 4)
    if isinstance(grid, tuple):
        return K.compress(grid)
    ri = tuple(i for i, r in enumerate(grid) if len(set(r)) == 1)
    ci = tuple(j for j, c in enumerate(p_dmirror(grid)) if len(set(c)) == 1)
    return tuple(tuple(v for j, v in enumerate(r) if j not in ci)
                 for i, r in enumerate(grid) if i not in ri)


def p_lefthalf(grid):
    """left half of the grid"""
    charge(_gcells(grid))
    return K.lefthalf(grid)


def p_righthalf(grid):
    """right half of the grid"""
    charge(_gcells(grid))
    return K.righthalf(grid)


# --- painting and recoloring ------------------------------------------------

def p_fill(grid, value, patch):
    """write value at the patch's indices"""
    charge(_gcells(grid) + _sized(patch))
    return K.fill(grid, value, _toindices(patch))


def p_underfill(grid, value, patch):
    """write value at the patch's indices, background cells only"""
    charge(_gcells(grid) + _sized(patch))
    return K.underfill(grid, value, _toindices(patch), _mostcolor(grid))


def p_paint(grid, obj):
    """write an object's colored cells onto the grid"""
    charge(_gcells(grid) + _sized(obj))
    return K.paint(grid, obj)


def p_replace(grid, replacee, replacer):
    """substitute one color for another"""
    charge(_gcells(grid))
    if isinstance(grid, tuple):
        return K.replace(grid, replacee, replacer)
    return tuple(tuple(replacer if v == replacee else v for v in r)
                 for r in grid)


def p_cellwise(a, b, fallback):
    """keep cells where both grids agree, else fallback"""
    charge(_gcells(a))
    return K.cellwise(a, b, fallback)


def p_canvas(value, dims):
    """constant grid of the given dimensions"""
    if isinstance(dims, tuple) and len(dims) == 2 \
            and isinstance(dims[0], int) and isinstance(dims[1], int):
        charge(max(dims[0], 0) * max(dims[1], 0))
    return K.canvas(value, dims)


# --- queries ----------------------------------------------------------------

def p_ofcolor(grid, value):
    """indices of all cells holding value"""
    charge(_gcells(grid))
    if isinstance(grid, tuple):
        return K.ofcolor(grid, value)
    return frozenset((i, j) for i, r in enumerate(grid)
                     for j, v in enumerate(r) if v == value)


def p_palette(element):
    """set of colors occurring in a grid or object"""
    charge(_sized(element))
    if isinstance(element, tuple):
        return frozenset({v for r in element for v in r})
    return frozenset({v for v, _ in element})


def p_numcolors(element):
    """number of distinct colors"""
    return len(p_palette(element))


def p_mostcolor(element):
    """most common color"""
    charge(_sized(element))
    return _mostcolor(element)


def p_leastcolor(element):
    """least common color"""
    charge(_sized(element))
    values = _values(element)
    return min(set(values), key=values.count)


def p_colorcount(element, value):
    """number of cells holding value"""
    charge(_sized(element))
    if isinstance(element, tuple):
        return K.colorcount_grid(element, value)
    return sum(v == value for v, _ in element)


def p_shape(piece):
    """(height, width) of a grid or patch"""
    charge(_sized(piece))
    return (_height(piece), _width(piece))


def p_ulcorner(patch):
    """index of the upper-left corner"""
    charge(_sized(patch))
    return _ulcorner(patch)


def p_square(piece):
    """whether the piece is square"""
    charge(_sized(piece))
    if isinstance(piece, tuple):
        return len(piece) == len(piece[0])
    return _height(piece) * _width(piece) == len(piece) \
        and _height(piece) == _width(piece)


def p_hline(patch):
    """whether the patch is a single-row line"""
    charge(_sized(patch))
    return _width(patch) == len(patch) and _height(patch) == 1


def p_position(a, b):
    """unit direction from patch a towards patch b"""
    charge(_sized(a) + _sized(b))
    ia = _uppermost(a) + _height(_toindices(a)) // 2
    ja = _leftmost(a) + _width(_toindices(a)) // 2
    ib = _uppermost(b) + _height(_toindices(b)) // 2
    jb = _leftmost(b) + _width(_toindices(b)) // 2
    if ia == ib:
        return (0, 1 if ja < jb else -1)
    elif ja == jb:
        return (1 if ia < ib else -1, 0)
    elif ia < ib:
        return (1, 1 if ja < jb else -1)
    return (-1, 1 if ja < jb else -1)


# --- objects and partitions --------------------------------------------------

def p_objects(grid, univalued, diagonal, without_bg):
    """connected components; see the four boolean toggles"""
    h, w = len(grid), len(grid[0])
    charge(h * w * 8)
    bg = _mostcolor(grid) if without_bg else None
    objs = set()
    occupied = set()
    unvisited = _asindices(grid)
    diagfun = _neighbors if diagonal else _dneighbors
    for loc in unvisited:
        if loc in occupied:
            continue
        val = grid[loc[0]][loc[1]]
        if val == bg:
            continue
        obj = {(val, loc)}
        cands = {loc}
        while len(cands) > 0:
            neighborhood = set()
            for cand in cands:
                v = grid[cand[0]][cand[1]]
                if (val == v) if univalued else (v != bg):
                    obj.add((v, cand))
                    occupied.add(cand)
                    neighborhood |= {
                        (i, j) for i, j in diagfun(cand) if 0 <= i < h and 0 <= j < w
                    }
            cands = neighborhood - occupied
        objs.add(frozenset(obj))
    return frozenset(objs)


def p_fgpartition(grid):
    """one object per non-background color"""
    charge(_gcells(grid) * 10)
    return frozenset(
        frozenset((v, (i, j)) for i, r in enumerate(grid)
                  for j, v in enumerate(r) if v == value)
        for value in p_palette(grid) - {_mostcolor(grid)}
    )


def p_asobject(grid):
    """the whole grid as one object"""
    charge(_gcells(grid))
    return frozenset((v, (i, j)) for i, r in enumerate(grid)
                     for j, v in enumerate(r))


def p_subgrid(patch, grid):
    """smallest subgrid containing the patch"""
    charge(_gcells(grid) + _sized(patch))
    return K.crop(grid, _ulcorner(patch), p_shape(patch))


def p_shift(patch, directions):
    """translate a patch"""
    charge(_sized(patch))
    if len(patch) == 0:
        return patch
    di, dj = directions
    if isinstance(next(iter(patch))[1], tuple):
        return frozenset((v, (i + di, j + dj)) for v, (i, j) in patch)
    return frozenset((i + di, j + dj) for i, j in patch)


def _box_between(si, sj, ei, ej):
    charge((ei - si + 1) + (ej - sj + 1))
    vlines = {(i, sj) for i in range(si, ei + 1)} | {(i, ej) for i in range(si, ei + 1)}
    hlines = {(si, j) for j in range(sj, ej + 1)} | {(ei, j) for j in range(sj, ej + 1)}
    return frozenset(vlines | hlines)


def p_box(patch):
    """outline of the patch's bounding box"""
    if len(patch) == 0:
        return patch
    ai, aj = _ulcorner(patch)
    bi, bj = _lrcorner(patch)
    return _box_between(min(ai, bi), min(aj, bj), max(ai, bi), max(aj, bj))


def p_inbox(patch):
    """outline one cell inside the bounding box"""
    ai, aj = _uppermost(patch) + 1, _leftmost(patch) + 1
    bi, bj = _lowermost(patch) - 1, _rightmost(patch) - 1
    return _box_between(min(ai, bi), min(aj, bj), max(ai, bi), max(aj, bj))


def p_outbox(patch):
    """outline one cell outside the bounding box"""
    ai, aj = _uppermost(patch) - 1, _leftmost(patch) - 1
    bi, bj = _lowermost(patch) + 1, _rightmost(patch) + 1
    return _box_between(min(ai, bi), min(aj, bj), max(ai, bi), max(aj, bj))


def p_delta(patch):
    """bounding-box indices not covered by the patch"""
    if len(patch) == 0:
        return frozenset({})
    idx, si, sj, ei, ej = _extent_charge(patch)
    charge(max(ei - si + 1, 0) * max(ej - sj + 1, 0))
    backdrop = frozenset((i, j) for i in range(si, ei + 1)
                         for j in range(sj, ej + 1))
    return backdrop - idx


# --- containers ---------------------------------------------------------------

def p_size(container):
    """number of elements"""
    return len(container)


def p_merge(containers):
    """union of a container of containers"""
    return _merge(containers)


def p_apply(fn, container):
    """apply fn to each element"""
    charge(_sized(container))
    return type(container)(fn(e) for e in container)


def p_sfilter(container, condition):
    """keep elements satisfying the predicate"""
    charge(_sized(container))
    return type(container)(e for e in container if condition(e))


def p_mfilter(container, fn):
    """filter by predicate, then merge the survivors"""
    return _merge(p_sfilter(container, fn))


def p_mapply(fn, containers):
    """apply fn to each element, then merge the results"""
    return _merge(p_apply(fn, containers))


def p_argmax(container, key):
    """element maximizing the key"""
    charge(_sized(container))
    return max(container, key=key)


def p_argmin(container, key):
    """element minimizing the key"""
    charge(_sized(container))
    return min(container, key=key)


def p_first(container):
    """first element in iteration order"""
    charge(1)
    return next(iter(container))


def p_last(container):
    """last element in iteration order"""
    charge(_sized(container))
    return max(enumerate(container))[1]


def p_colorfilter(objs, value):
    """objects whose color is value"""
    charge(_sized(objs))
    return frozenset(obj for obj in objs if next(iter(obj))[0] == value)


def p_sizefilter(container, n):
    """elements with exactly n cells"""
    charge(_sized(container))
    return frozenset(item for item in container if len(item) == n)


def p_difference(a, b):
    """elements of a not in b"""
    charge(_sized(a) + _sized(b))
    return type(a)(e for e in a if e not in b)


def p_intersection(a, b):
    """elements common to both sets"""
    charge(_sized(a) + _sized(b))
    return a & b


def p_combine(a, b):
    """all elements of both containers"""
    charge(_sized(a) + _sized(b))
    return type(a)((*a, *b))


def p_contained(value, container):
    """membership test"""
    charge(_sized(container))
    return value in container


# --- scalars -------------------------------------------------------------------

def p_astuple(a, b):
    """pair constructor"""
    return (a, b)


def _num_charge(a, b):
    bits = 1
    if isinstance(a, int):
        bits += a.bit_length()
    if isinstance(b, int):
        bits += b.bit_length()
    charge(bits)


def p_add(a, b):
    """addition on ints and int pairs"""
    _num_charge(a, b)
    if isinstance(a, int) and isinstance(b, int):
        return a + b
    elif isinstance(a, tuple) and isinstance(b, tuple):
        return (a[0] + b[0], a[1] + b[1])
    elif isinstance(a, int) and isinstance(b, tuple):
        return (a + b[0], a + b[1])
    return (a[0] + b, a[1] + b)


def p_multiply(a, b):
    """multiplication on ints and int pairs"""
    _num_charge(a, b)
    if isinstance(a, int) and isinstance(b, int):
        return a * b
    elif isinstance(a, tuple) and isinstance(b, tuple):
        return (a[0] * b[0], a[1] * b[1])
    elif isinstance(a, int) and isinstance(b, tuple):
        return (a * b[0], a * b[1])
    return (a[0] * b, a[1] * b)


def p_branch(condition, a, b):
    """if-else on a boolean"""
    return a if condition else b


def p_flip(b):
    """logical not"""
    return not b


# --- function combinators ---------------------------------------------------

def p_compose(outer, inner):
    """function composition (outer after inner)"""
    return FuncValue(lambda x: outer(inner(x)), 1,
                     f"compose({getattr(outer, 'name', '?')},{getattr(inner, 'name', '?')})")


def p_matcher(fn, target):
    """predicate testing fn(x) == target"""
    return FuncValue(lambda x: fn(x) == target, 1,
                     f"matcher({getattr(fn, 'name', '?')})")


def p_rbind(fn, fixed):
    """fix the rightmost argument of a 2..4-ary function"""
    n = fn.arity
    name = f"rbind({getattr(fn, 'name', '?')})"
    if n == 2:
        return FuncValue(lambda x: fn(x, fixed), 1, name)
    elif n == 3:
        return FuncValue(lambda x, y: fn(x, y, fixed), 2, name)
    return FuncValue(lambda x, y, z: fn(x, y, z, fixed), 3, name)


# ---------------------------------------------------------------------------
# Registry assembly

def _infer_passthrough(pos: int):
    def infer(arg_types):
        t = arg_types[pos]
        if t.tag in ("OBJECT", "INDICES", "CONTAINER", "GRID",
                     "INTEGER", "INTEGER_PAIR", "BOOLEAN", "FUNCTION"):
            return t
        return t if t.alts else D.ANY
    return infer


def _infer_elem(arg_types):
    t = arg_types[0]
    if t.tag == "CONTAINER":
        return t.elem or D.ANY
    if t.tag == "INDICES":
        return D.INTEGER_PAIR
    if t.tag == "INTEGER_PAIR":
        return D.INTEGER
    return D.ANY


def _infer_merge_of(t: D.DslType) -> D.DslType:
    # merging C(OBJECT) yields an OBJECT, C(INDICES) an INDICES,
    # C(C(t)) a C(t); anything else is unknown statically
    if t.tag == "CONTAINER" and t.elem is not None:
        if t.elem.tag in ("OBJECT", "INDICES", "CONTAINER"):
            return t.elem
    return D.ANY


def _infer_merge(arg_types):
    return _infer_merge_of(arg_types[0])


def _infer_mfilter(arg_types):
    return _infer_merge_of(arg_types[0])


def _infer_apply(arg_types):
    fn_t, cont_t = arg_types
    ret = fn_t.ret if fn_t.tag == "FUNCTION" and fn_t.ret is not None else D.ANY
    if cont_t.tag == "CONTAINER":
        return D.container(ret)
    return D.container(D.ANY)


def _infer_mapply(arg_types):
    fn_t = arg_types[0]
    ret = fn_t.ret if fn_t.tag == "FUNCTION" and fn_t.ret is not None else D.ANY
    if ret.tag in ("OBJECT", "INDICES"):
        return ret
    return D.ANY


def _infer_shift(arg_types):
    t = arg_types[0]
    if t.tag in ("OBJECT", "INDICES"):
        return t
    return D.PATCH


def _infer_branch(arg_types):
    _, a, b = arg_types
    if a == b:
        return a
    if a.tag == "ANY" and a.alts is None:
        return b
    if b.tag == "ANY" and b.alts is None:
        return a
    return D.ANY


def _infer_arith(arg_types):
    a, b = arg_types
    if a.tag == "INTEGER" and b.tag == "INTEGER":
        return D.INTEGER
    if "ANY" in (a.tag, b.tag):
        return D.union(D.INTEGER, D.INTEGER_PAIR)
    return D.INTEGER_PAIR


def _infer_compose(arg_types):
    outer, inner = arg_types
    params = inner.params if inner.tag == "FUNCTION" else None
    ret = outer.ret if outer.tag == "FUNCTION" and outer.ret is not None else D.ANY
    return D.function(params, ret)


def _infer_matcher(arg_types):
    fn_t = arg_types[0]
    params = fn_t.params if fn_t.tag == "FUNCTION" else None
    return D.function(params, D.BOOLEAN)


def _infer_rbind(arg_types):
    fn_t = arg_types[0]
    if fn_t.tag == "FUNCTION" and fn_t.params is not None:
        return D.function(fn_t.params[:-1], fn_t.ret or D.ANY)
    return D.function(None, D.ANY)


GRID = D.GRID
OBJ = D.OBJECT
IDX = D.INDICES
INT = D.INTEGER
IP = D.INTEGER_PAIR
BOOL = D.BOOLEAN
F1 = D.function((D.ANY,))
PRED1 = D.function((D.ANY,), D.BOOLEAN)
KEY1 = D.function((D.ANY,), D.INTEGER)
BINDABLE = D.union(D.function((D.ANY, D.ANY)),
                   D.function((D.ANY, D.ANY, D.ANY)),
                   D.function((D.ANY, D.ANY, D.ANY, D.ANY)))


@lru_cache(maxsize=1)
def default_registry() -> D.Registry:
    """The registry of implemented primitives."""
    P = D.Primitive
    prims = [
        # geometry
        P("vmirror", (GRID,), GRID, p_vmirror, "mirror along the vertical axis"),
        P("hmirror", (GRID,), GRID, p_hmirror, "mirror along the horizontal axis"),
        P("dmirror", (GRID,), GRID, p_dmirror, "mirror along the main diagonal"),
        P("cmirror", (GRID,), GRID, p_cmirror, "mirror along the counterdiagonal"),
        P("rot90", (GRID,), GRID, p_rot90, "quarter clockwise rotation"),
        P("rot180", (GRID,), GRID, p_rot180, "half rotation"),
        P("rot270", (GRID,), GRID, p_rot270, "quarter anticlockwise rotation"),
        P("hconcat", (GRID, GRID), GRID, p_hconcat, "concatenate left-to-right"),
        P("vconcat", (GRID, GRID), GRID, p_vconcat, "concatenate top-to-bottom"),
        P("upscale", (GRID, INT), GRID, p_upscale, "integer upscaling"),
        P("downscale", (GRID, INT), GRID, p_downscale, "integer downscaling"),
        P("compress", (GRID,), GRID, p_compress, "drop single-colored rows and columns"),
        P("lefthalf", (GRID,), GRID, p_lefthalf, "left half of the grid"),
        P("righthalf", (GRID,), GRID, p_righthalf, "right half of the grid"),
        # painting
        P("fill", (GRID, INT, D.PATCH), GRID, p_fill, "write a color at indices"),
        P("underfill", (GRID, INT, D.PATCH), GRID, p_underfill,
          "write a color at indices over background only"),
        P("paint", (GRID, OBJ), GRID, p_paint, "paint an object onto the grid"),
        P("replace", (GRID, INT, INT), GRID, p_replace, "substitute a color"),
        P("cellwise", (GRID, GRID, INT), GRID, p_cellwise,
          "cellwise agreement with fallback"),
        P("canvas", (INT, IP), GRID, p_canvas, "constant grid of given shape"),
        # queries
        P("ofcolor", (GRID, INT), IDX, p_ofcolor, "indices of cells with a color"),
        P("palette", (D.ELEMENT,), D.container(INT), p_palette, "set of colors used"),
        P("numcolors", (D.ELEMENT,), INT, p_numcolors, "number of distinct colors"),
        P("mostcolor", (D.ELEMENT,), INT, p_mostcolor, "most common color"),
        P("leastcolor", (D.ELEMENT,), INT, p_leastcolor, "least common color"),
        P("colorcount", (D.ELEMENT, INT), INT, p_colorcount,
          "number of cells with a color"),
        P("shape", (D.PIECE,), IP, p_shape, "(height, width)"),
        P("ulcorner", (D.PATCH,), IP, p_ulcorner, "upper-left corner index"),
        P("square", (D.PATCH,), BOOL, p_square, "whether the piece is square"),
        P("hline", (D.PATCH,), BOOL, p_hline, "whether the patch is a 1-row line"),
        P("position", (D.PATCH, D.PATCH), IP, p_position,
          "unit direction between patch centers"),
        # objects
        P("objects", (GRID, BOOL, BOOL, BOOL), D.container(OBJ), p_objects,
          "connected components (univalued, diagonal, without_bg)"),
        P("fgpartition", (GRID,), D.container(OBJ), p_fgpartition,
          "per-color objects, background excluded"),
        P("asobject", (GRID,), OBJ, p_asobject, "whole grid as an object"),
        P("subgrid", (D.PATCH, GRID), GRID, p_subgrid,
          "smallest subgrid containing the patch"),
        P("shift", (D.PATCH, IP), D.PATCH, p_shift, "translate a patch",
          infer=_infer_shift),
        P("box", (D.PATCH,), IDX, p_box, "bounding-box outline"),
        P("inbox", (D.PATCH,), IDX, p_inbox, "outline one cell inside"),
        P("outbox", (D.PATCH,), IDX, p_outbox, "outline one cell outside"),
        P("delta", (D.PATCH,), IDX, p_delta, "bounding box minus the patch"),
        # containers
        P("size", (D.SETLIKE,), INT, p_size, "number of elements"),
        P("merge", (D.container(D.ANY),), D.ANY, p_merge,
          "union of a container of containers", infer=_infer_merge),
        P("apply", (F1, D.container(D.ANY)), D.container(D.ANY), p_apply,
          "apply a function to each element", infer=_infer_apply),
        P("sfilter", (D.SETLIKE, PRED1), D.ANY, p_sfilter,
          "keep elements satisfying a predicate", infer=_infer_passthrough(0)),
        P("mfilter", (D.container(D.ANY), PRED1), D.ANY, p_mfilter,
          "filter then merge", infer=_infer_mfilter),
        P("mapply", (F1, D.container(D.ANY)), D.ANY, p_mapply,
          "apply then merge", infer=_infer_mapply),
        P("argmax", (D.SETLIKE, KEY1), D.ANY, p_argmax,
          "element maximizing a key", infer=_infer_elem),
        P("argmin", (D.SETLIKE, KEY1), D.ANY, p_argmin,
          "element minimizing a key", infer=_infer_elem),
        P("first", (D.ITERABLE,), D.ANY, p_first, "first element",
          infer=_infer_elem),
        P("last", (D.ITERABLE,), D.ANY, p_last, "last element",
          infer=_infer_elem),
        P("colorfilter", (D.container(OBJ), INT), D.container(OBJ), p_colorfilter,
          "objects of a given color"),
        P("sizefilter", (D.container(D.ANY), INT), D.container(D.ANY), p_sizefilter,
          "elements of a given size", infer=_infer_passthrough(0)),
        P("difference", (D.SETLIKE, D.SETLIKE), D.ANY, p_difference,
          "set difference", infer=_infer_passthrough(0)),
        P("intersection", (D.SETLIKE, D.SETLIKE), D.ANY, p_intersection,
          "set intersection", infer=_infer_passthrough(0)),
        P("combine", (D.SETLIKE, D.SETLIKE), D.ANY, p_combine,
          "set union", infer=_infer_passthrough(0)),
        P("contained", (D.ANY, D.ITERABLE), BOOL, p_contained, "membership test"),
        # scalars
        P("astuple", (INT, INT), IP, p_astuple, "pair constructor"),
        P("add", (D.NUMERICAL, D.NUMERICAL), D.NUMERICAL, p_add,
          "addition on ints and pairs", infer=_infer_arith),
        P("multiply", (D.NUMERICAL, D.NUMERICAL), D.NUMERICAL, p_multiply,
          "multiplication on ints and pairs", infer=_infer_arith),
        P("branch", (BOOL, D.ANY, D.ANY), D.ANY, p_branch, "if-else",
          infer=_infer_branch),
        P("flip", (BOOL,), BOOL, p_flip, "logical not"),
        # combinators
        P("compose", (F1, F1), D.function(None, D.ANY), p_compose,
          "function composition", infer=_infer_compose),
        P("matcher", (F1, D.ANY), D.function(None, BOOL), p_matcher,
          "equality predicate from a key function", infer=_infer_matcher),
        P("rbind", (BINDABLE, D.ANY), D.function(None, D.ANY), p_rbind,
          "fix the rightmost argument", infer=_infer_rbind),
    ]
    return D.Registry(prims)


def primitive_value(p: D.Primitive) -> FuncValue:
    """Wrap a registry entry for use as a first-class function value."""
    return FuncValue(p.fn, p.arity, p.name)
