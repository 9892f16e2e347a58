"""Parser, printer, type system, and registry coverage."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridexit.dsl import (BOOLEAN, CONSTANTS, GRID, DslSyntaxError,
                          TypeCheckError, UndefinedVariable, UnknownPrimitive,
                          dsl_reference, parse_program, print_program,
                          typecheck, unifies, union)
from gridexit.sampling import random_program

from golden_programs import GOLDEN

# Every primitive name occurring in the published listings and in the
# documented minimum subset must resolve in the registry.
REQUIRED_PRIMITIVES = [
    "vmirror", "hmirror", "dmirror", "cmirror", "rot90", "rot180", "rot270",
    "hconcat", "vconcat", "upscale", "downscale", "fill", "underfill",
    "replace", "ofcolor", "objects", "fgpartition", "subgrid", "palette",
    "compress", "lefthalf", "righthalf", "cellwise", "box", "inbox",
    "outbox", "delta", "apply", "sfilter", "mfilter", "mapply", "merge",
    "argmax", "argmin", "size", "colorfilter", "sizefilter", "difference",
    "intersection", "combine", "shape", "canvas", "paint", "shift",
    "ulcorner", "astuple", "multiply", "add", "position", "first", "last",
    "branch", "contained", "matcher", "compose", "flip", "rbind",
    "colorcount", "leastcolor", "mostcolor", "numcolors", "asobject",
    "hline", "square",
]

REQUIRED_CONSTANTS = ["ZERO", "ONE", "TWO", "THREE", "FOUR", "FIVE", "SIX",
                      "SEVEN", "EIGHT", "NINE", "TEN", "T", "F"]


def test_registry_completeness(registry):
    for name in REQUIRED_PRIMITIVES:
        assert name in registry, name
    for name in REQUIRED_CONSTANTS:
        assert name in CONSTANTS, name


def test_registry_names_sorted_and_unique(registry):
    names = registry.names()
    assert list(names) == sorted(set(names))


class TestParse:
    def test_three_line_program(self, registry):
        src = "x1 = vmirror(I)\nx2 = hconcat(x1, I)\nO = hconcat(x2, x2)"
        p = parse_program(src, registry)
        assert len(p) == 3
        assert p.lines[0].func == "vmirror"
        assert p.lines[2].var == "O"

    def test_one_line_program(self, registry):
        p = parse_program("O = rot90(I)", registry)
        assert len(p) == 1

    def test_forward_reference(self, registry):
        with pytest.raises(UndefinedVariable):
            parse_program("x1 = vmirror(x2)\nO = rot90(x1)", registry)

    def test_unknown_primitive(self, registry):
        with pytest.raises(UnknownPrimitive):
            parse_program("O = spin(I)", registry)

    def test_syntax_error_carries_position(self, registry):
        with pytest.raises(DslSyntaxError) as err:
            parse_program("x1 = rot90(I)\nO rot90(I)", registry)
        assert err.value.line == 2

    def test_wrong_variable_order(self, registry):
        with pytest.raises(DslSyntaxError):
            parse_program("x2 = rot90(I)\nO = rot90(x2)", registry)

    def test_missing_final_output(self, registry):
        with pytest.raises(DslSyntaxError):
            parse_program("x1 = rot90(I)", registry)

    def test_constant_argument(self, registry):
        p = parse_program("x1 = ofcolor(I, THREE)\nO = subgrid(x1, I)", registry)
        assert p.lines[0].args[1].kind == "constant"

    def test_primitive_argument(self, registry):
        p = parse_program("x1 = fgpartition(I)\nx2 = mapply(delta, x1)\n"
                          "O = fill(I, ONE, x2)", registry)
        assert p.lines[1].args[0].kind == "primitive"

    def test_nested_calls_rejected(self, registry):
        with pytest.raises(DslSyntaxError):
            parse_program("O = rot90(vmirror(I))", registry)


class TestTypecheck:
    def test_grid_pair_ok(self, registry):
        typecheck(parse_program("O = hconcat(I, I)", registry), registry)

    def test_integer_where_grid_expected(self, registry):
        with pytest.raises(TypeCheckError, match="line 1"):
            parse_program("O = hconcat(I, ONE)", registry)

    def test_arity_error(self, registry):
        with pytest.raises(TypeCheckError):
            parse_program("O = vmirror(I, I)", registry)

    def test_error_names_expected_and_actual(self, registry):
        with pytest.raises(TypeCheckError, match="expects .*GRID.*got .*INTEGER"):
            parse_program("O = rot90(ONE)", registry)

    @pytest.mark.parametrize("name,text,inputs", GOLDEN,
                             ids=[g[0] for g in GOLDEN])
    def test_published_listings_typecheck(self, registry, name, text, inputs):
        typecheck(parse_program(text, registry), registry)


class TestPrinter:
    def test_canonical_form(self, registry):
        p = parse_program("O = rot90(I)", registry)
        assert print_program(p) == "O = rot90(I)"

    @pytest.mark.parametrize("name,text,inputs", GOLDEN,
                             ids=[g[0] for g in GOLDEN])
    def test_published_listings_roundtrip_byte_identical(
            self, registry, name, text, inputs):
        assert print_program(parse_program(text, registry)) == text

    @settings(max_examples=300, deadline=None)
    @given(st.integers(0, 10**9))
    def test_parse_print_inverse_on_sampled_programs(self, seed):
        from gridexit.semantics import default_registry
        registry = default_registry()
        rng = random.Random(f"roundtrip|{seed}")
        p = random_program(registry, rng, stop_probability=0.6)
        text = print_program(p)
        again = parse_program(text, registry)
        assert again == p
        assert print_program(again) == text


class TestReturnTypeIndex:
    def test_grid_producers(self, registry):
        names = {p.name for p in registry.with_return_type(GRID)}
        assert {"vmirror", "rot90", "hconcat", "canvas", "subgrid"} <= names

    def test_boolean_producers(self, registry):
        names = {p.name for p in registry.with_return_type(BOOLEAN)}
        assert {"contained", "square", "hline", "flip"} <= names

    def test_empty_when_nothing_produces_the_type(self):
        # wildcard-returning primitives (branch, merge) can produce any
        # type, so only a registry without them has empty result sets
        from gridexit.dsl import Registry, container, function
        sub = Registry([p for p in __import__("gridexit.semantics",
                                              fromlist=["default_registry"])
                        .default_registry() if p.name in ("rot90", "size")])
        assert sub.with_return_type(container(function((GRID, GRID)))) == ()

    def test_deterministic_order(self, registry):
        a = [p.name for p in registry.with_return_type(GRID)]
        assert a == sorted(a)


class TestUnify:
    def test_any_is_wildcard(self, registry):
        from gridexit.dsl import ANY, INTEGER
        assert unifies(ANY, INTEGER)
        assert unifies(INTEGER, ANY)

    def test_union_accepts_members(self):
        from gridexit.dsl import INDICES, OBJECT, INTEGER
        patch = union(OBJECT, INDICES)
        assert unifies(patch, OBJECT)
        assert unifies(patch, INDICES)
        assert not unifies(patch, INTEGER)

    def test_container_structure(self):
        from gridexit.dsl import INDICES, INTEGER_PAIR, OBJECT, container
        assert unifies(container(), OBJECT)
        assert unifies(container(INTEGER_PAIR), INDICES)
        assert not unifies(OBJECT, container())


def test_primitives_with_return_type_alias(registry):
    from gridexit.dsl import primitives_with_return_type
    assert primitives_with_return_type(registry, GRID) == \
        registry.with_return_type(GRID)


def test_reference_document_lists_every_primitive(registry):
    doc = dsl_reference(registry)
    for name in REQUIRED_PRIMITIVES + REQUIRED_CONSTANTS:
        assert name in doc
