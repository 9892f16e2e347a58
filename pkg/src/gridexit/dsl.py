"""Typed straight-line DSL: types, AST, registry, parser, and printer.

Programs are sequences of single-call assignments ``x1 = func(arg, ...)``
ending in an assignment to ``O``. Arguments are the input symbol ``I``,
earlier variables, named constants, or primitive names used as first-class
function values; calls never nest.

The type universe is a closed tag set. Container and function types carry
structure (element type, signature); parameter positions may accept a
union of tags (e.g. a "patch" is an object or an index set), expressed as
an ANY-tagged type with explicit alternatives. Primitives whose result
type depends on their arguments (``shift``, ``merge``, ``first``, ...)
declare an inference rule so variables still get concrete types where
statically known.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

TAGS = ("GRID", "OBJECT", "INDICES", "INTEGER", "INTEGER_PAIR", "BOOLEAN",
        "CONTAINER", "FUNCTION", "ANY")


@dataclass(frozen=True)
class DslType:
    tag: str
    elem: Optional["DslType"] = None          # CONTAINER element type
    params: Optional[tuple["DslType", ...]] = None  # FUNCTION signature
    ret: Optional["DslType"] = None
    alts: Optional[tuple["DslType", ...]] = None    # ANY with known alternatives

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown type tag {self.tag!r}")

    def __repr__(self):
        if self.tag == "CONTAINER":
            return f"CONTAINER({self.elem!r})" if self.elem else "CONTAINER"
        if self.tag == "FUNCTION":
            if self.params is None:
                return "FUNCTION"
            ps = ", ".join(repr(p) for p in self.params)
            return f"FUNCTION(({ps}) -> {self.ret!r})"
        if self.tag == "ANY" and self.alts:
            return " | ".join(repr(a) for a in self.alts)
        return self.tag


GRID = DslType("GRID")
OBJECT = DslType("OBJECT")
INDICES = DslType("INDICES")
INTEGER = DslType("INTEGER")
INTEGER_PAIR = DslType("INTEGER_PAIR")
BOOLEAN = DslType("BOOLEAN")
ANY = DslType("ANY")


def container(elem: DslType = ANY) -> DslType:
    return DslType("CONTAINER", elem=elem)


def function(params: Optional[tuple[DslType, ...]] = None,
             ret: Optional[DslType] = None) -> DslType:
    return DslType("FUNCTION", params=params, ret=ret if ret is not None else ANY)


def union(*alts: DslType) -> DslType:
    return DslType("ANY", alts=tuple(alts))


# Parameter unions mirroring the reference DSL's polymorphism.
PATCH = union(OBJECT, INDICES)
ELEMENT = union(GRID, OBJECT)
PIECE = union(GRID, OBJECT, INDICES)
NUMERICAL = union(INTEGER, INTEGER_PAIR)
SETLIKE = union(container(ANY), OBJECT, INDICES)
ITERABLE = union(container(ANY), OBJECT, INDICES, INTEGER_PAIR)


def unifies(want: DslType, got: DslType) -> bool:
    """Whether a value of type `got` is acceptable where `want` is expected.

    ANY is a wildcard on either side; ANY with alternatives accepts a match
    against any alternative. Containers check element types covariantly,
    object/index sets count as containers, and function types compare
    arity, return, and parameter positions (unspecified signatures accept
    anything).
    """
    if want.tag == "ANY":
        if want.alts is None:
            return True
        return any(unifies(alt, got) for alt in want.alts)
    if got.tag == "ANY":
        if got.alts is None:
            return True
        return any(unifies(want, alt) for alt in got.alts)
    if want.tag == "CONTAINER":
        if got.tag == "CONTAINER":
            return unifies(want.elem or ANY, got.elem or ANY)
        if got.tag == "OBJECT":
            return (want.elem or ANY).tag == "ANY"
        if got.tag == "INDICES":
            return unifies(want.elem or ANY, INTEGER_PAIR)
        return False
    if want.tag == "FUNCTION":
        if got.tag != "FUNCTION":
            return False
        if want.params is None or got.params is None:
            return True
        if len(want.params) != len(got.params):
            return False
        if not unifies(want.ret or ANY, got.ret or ANY):
            return False
        return all(unifies(w, g) for w, g in zip(want.params, got.params))
    return want.tag == got.tag


# ---------------------------------------------------------------------------
# Terms and programs

@dataclass(frozen=True)
class Term:
    """One argument: the input I, a variable, a constant, or a primitive."""

    kind: str  # "input" | "variable" | "constant" | "primitive"
    name: str

    def text(self) -> str:
        return self.name


INPUT = Term("input", "I")


def var(name: str) -> Term:
    return Term("variable", name)


def const(name: str) -> Term:
    return Term("constant", name)


def prim(name: str) -> Term:
    return Term("primitive", name)


@dataclass(frozen=True)
class Assignment:
    var: str
    func: str
    args: tuple[Term, ...]

    def text(self) -> str:
        return f"{self.var} = {self.func}({', '.join(t.text() for t in self.args)})"


@dataclass(frozen=True)
class Program:
    lines: tuple[Assignment, ...]

    def __len__(self) -> int:
        return len(self.lines)

    def __iter__(self) -> Iterator[Assignment]:
        return iter(self.lines)


CONSTANTS: dict[str, tuple[object, DslType]] = {
    "ZERO": (0, INTEGER), "ONE": (1, INTEGER), "TWO": (2, INTEGER),
    "THREE": (3, INTEGER), "FOUR": (4, INTEGER), "FIVE": (5, INTEGER),
    "SIX": (6, INTEGER), "SEVEN": (7, INTEGER), "EIGHT": (8, INTEGER),
    "NINE": (9, INTEGER), "TEN": (10, INTEGER),
    "T": (True, BOOLEAN), "F": (False, BOOLEAN),
}


# ---------------------------------------------------------------------------
# Registry

InferFn = Callable[[tuple[DslType, ...]], DslType]


@dataclass(frozen=True)
class Primitive:
    name: str
    params: tuple[DslType, ...]
    ret: DslType
    fn: Callable
    doc: str = ""
    infer: Optional[InferFn] = None

    @property
    def arity(self) -> int:
        return len(self.params)

    def signature(self) -> tuple:
        return (self.params, self.ret)

    def function_type(self) -> DslType:
        return function(self.params, self.ret)

    def result_type(self, arg_types: tuple[DslType, ...]) -> DslType:
        if self.infer is not None:
            return self.infer(arg_types)
        return self.ret


class Registry:
    """Immutable-after-construction name -> Primitive table."""

    def __init__(self, primitives: list[Primitive]):
        self._by_name: dict[str, Primitive] = {}
        for p in primitives:
            if p.name in self._by_name:
                raise ValueError(f"duplicate primitive {p.name}")
            self._by_name[p.name] = p
        self._sorted = tuple(sorted(self._by_name.values(), key=lambda p: p.name))

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __len__(self) -> int:
        return len(self._sorted)

    def __iter__(self) -> Iterator[Primitive]:
        return iter(self._sorted)

    def get(self, name: str) -> Primitive:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownPrimitive(f"unknown primitive {name!r}") from None

    def names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self._sorted)

    def with_return_type(self, t: DslType) -> tuple[Primitive, ...]:
        """Primitives whose declared return type unifies with `t`, by name."""
        return tuple(p for p in self._sorted
                     if unifies(t, p.ret) or unifies(p.ret, t))


# ---------------------------------------------------------------------------
# Errors

class ProgramError(ValueError):
    """Base for everything a caller treats as 'syntactically incorrect'."""


class DslSyntaxError(ProgramError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class UnknownPrimitive(ProgramError):
    pass


class UndefinedVariable(ProgramError):
    pass


class TypeCheckError(ProgramError):
    pass


# ---------------------------------------------------------------------------
# Parser / printer

_LINE_RE = re.compile(
    r"^(?P<var>[A-Za-z_]\w*)\s*=\s*(?P<func>[A-Za-z_]\w*)\((?P<args>[^()]*)\)\s*$"
)
_VAR_RE = re.compile(r"^x[1-9]\d*$")


def print_program(p: Program) -> str:
    """Canonical text: one assignment per line, single spaces after commas."""
    return "\n".join(line.text() for line in p.lines)


def _parse_term(tok: str, line_no: int, col: int, defined: set[str],
                registry: Registry) -> Term:
    if tok == "I":
        return INPUT
    if tok in CONSTANTS:
        return const(tok)
    if _VAR_RE.match(tok):
        if tok not in defined:
            raise UndefinedVariable(
                f"line {line_no}: variable {tok} used before definition")
        return var(tok)
    if tok in registry:
        return prim(tok)
    if re.match(r"^[A-Za-z_]\w*$", tok):
        raise UnknownPrimitive(f"line {line_no}: unknown name {tok!r}")
    raise DslSyntaxError(f"malformed argument {tok!r}", line_no, col)


def parse_program(src: str, registry: Registry, check_types: bool = True) -> Program:
    """Parse program text; raises a ProgramError subclass on any defect.

    Enforces the naming discipline (lines define x1..xN in order, the final
    line defines O) and, unless `check_types` is false, runs the
    typechecker so the returned AST is known well-typed.
    """
    lines = [ln for ln in src.splitlines() if ln.strip() != ""]
    if not lines:
        raise DslSyntaxError("empty program", 1, 1)
    parsed: list[Assignment] = []
    defined: set[str] = set()
    for idx, raw in enumerate(lines, start=1):
        m = _LINE_RE.match(raw.strip())
        if m is None:
            raise DslSyntaxError("expected 'var = func(arg, ...)'", idx,
                                 len(raw) - len(raw.lstrip()) + 1)
        name, func, argtext = m.group("var"), m.group("func"), m.group("args")
        expected = "O" if idx == len(lines) else f"x{idx}"
        if name != expected:
            raise DslSyntaxError(
                f"expected assignment to {expected}, found {name}", idx, 1)
        if func not in registry:
            raise UnknownPrimitive(f"line {idx}: unknown primitive {func!r}")
        if argtext.strip() == "":
            raise DslSyntaxError("call with no arguments", idx, raw.find("(") + 2)
        args = []
        col = raw.find("(") + 2
        for tok in argtext.split(","):
            args.append(_parse_term(tok.strip(), idx, col, defined, registry))
            col += len(tok) + 1
        parsed.append(Assignment(name, func, tuple(args)))
        defined.add(name)
    program = Program(tuple(parsed))
    if check_types:
        typecheck(program, registry)
    return program


# ---------------------------------------------------------------------------
# Typechecker

@dataclass
class TypeInfo:
    var_types: dict[str, DslType] = field(default_factory=dict)
    line_arg_types: list[tuple[DslType, ...]] = field(default_factory=list)


def term_type(term: Term, var_types: dict[str, DslType],
              registry: Registry) -> DslType:
    if term.kind == "input":
        return GRID
    if term.kind == "constant":
        return CONSTANTS[term.name][1]
    if term.kind == "variable":
        try:
            return var_types[term.name]
        except KeyError:
            raise UndefinedVariable(f"variable {term.name} not in scope") from None
    return registry.get(term.name).function_type()


def typecheck(p: Program, registry: Registry) -> TypeInfo:
    """Validate the program's invariants; returns inferred variable types.

    Raises TypeCheckError naming the offending line with expected/actual
    types; UndefinedVariable / UnknownPrimitive for scoping defects.
    """
    info = TypeInfo()
    var_types: dict[str, DslType] = {}
    for idx, line in enumerate(p.lines, start=1):
        primitive = registry.get(line.func)
        if len(line.args) != primitive.arity:
            raise TypeCheckError(
                f"line {idx}: {line.func} expects {primitive.arity} "
                f"arguments, got {len(line.args)}")
        expected_var = "O" if idx == len(p.lines) else f"x{idx}"
        if line.var != expected_var:
            raise TypeCheckError(
                f"line {idx}: defines {line.var}, expected {expected_var}")
        arg_types = []
        for pos, (want, term) in enumerate(zip(primitive.params, line.args), 1):
            got = term_type(term, var_types, registry)
            if not unifies(want, got):
                raise TypeCheckError(
                    f"line {idx}: argument {pos} of {line.func} expects "
                    f"{want!r}, got {got!r}")
            arg_types.append(got)
        arg_types = tuple(arg_types)
        var_types[line.var] = primitive.result_type(arg_types)
        info.line_arg_types.append(arg_types)
    info.var_types = var_types
    return info


def program_ok(p: Program, registry: Registry) -> bool:
    try:
        typecheck(p, registry)
        return True
    except ProgramError:
        return False


def primitives_with_return_type(registry: Registry,
                                t: DslType) -> tuple[Primitive, ...]:
    """Primitives able to produce a value of type `t`, in name order."""
    return registry.with_return_type(t)


def dsl_reference(registry: Registry) -> str:
    """Generated primitive reference: name, signature, one-line semantics."""
    out = ["# DSL primitive reference", ""]
    for p in registry:
        sig = ", ".join(repr(t) for t in p.params)
        out.append(f"{p.name}({sig}) -> {p.ret!r}")
        out.append(f"    {p.doc}")
    out.append("")
    out.append("# Constants")
    for name, (value, t) in CONSTANTS.items():
        out.append(f"{name} = {value} : {t!r}")
    return "\n".join(out)
