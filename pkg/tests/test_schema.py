from __future__ import annotations

import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hdtkg.errors import AmbiguousName, UnknownClass, UnknownProperty
from hdtkg.schema import (
    ClassDef,
    Direction,
    InferenceRuleDecl,
    PropertyDef,
    Schema,
    builtin_schema,
    check_schema,
    dump_schema,
    split_token,
)


@pytest.fixture(scope="module")
def schema():
    return builtin_schema()


def test_builtin_is_valid_with_one_widening_warning(schema):
    diags = check_schema(schema)
    assert [(d.code, d.severity, d.ref) for d in diags] == [("RangeWidened", "warning", "HP11")]


def test_every_hdt_class_reaches_root(schema):
    for c in schema.class_list:
        if c.namespace == "hdt":
            assert "HC1" in schema.superclasses(c.code)
        assert "crm:E1" in schema.superclasses(c.code)


def test_subsumption_examples(schema):
    assert schema.is_subclass("HC16", "HC2")
    assert schema.is_subclass("HC19", "crm:D9")
    assert schema.is_subclass("HC7", "HC4")
    assert not schema.is_subclass("HC2", "HC16")


def test_only_hc1_is_abstract(schema):
    assert [c.code for c in schema.class_list if c.abstract] == ["HC1"]


def test_literal_valued_classes(schema):
    assert {c.code for c in schema.class_list if c.literal_valued} == {"HC11", "HC12", "crm:E55"}


@pytest.mark.parametrize("token,code", [
    ("HC16 Tangible Asset", "HC16"),
    ("HC 11 Heritage Identifier", "HC11"),
    ("HP19 Heritage Digital Document", "HC19"),
    ("crm:E55 Type", "crm:E55"),
    ("E5 Event", "crm:E5"),
    ("Heritage Location", "HC13"),
])
def test_resolve_class(schema, token, code):
    assert schema.resolve_class(token)[0].code == code


def test_resolve_class_name_wins_with_warning(schema):
    cdef, diags = schema.resolve_class("HC5 Heritage Document")
    assert cdef.code == "HC4"
    assert [d.code for d in diags] == ["LabelNormalized"]


def test_unknown_class(schema):
    with pytest.raises(UnknownClass):
        schema.resolve_class("HC99 Flying Carpet")


def test_resolve_property_directions(schema):
    pdef, direction, _ = schema.resolve_property("HP1", "is digital twin of")
    assert (pdef.code, direction) == ("HP1", Direction.INVERSE)
    pdef, direction, _ = schema.resolve_property(None, "is located in")
    assert (pdef.code, direction) == ("HP12", Direction.FORWARD)


def test_has_type_needs_a_code(schema):
    with pytest.raises(AmbiguousName):
        schema.resolve_property(None, "has type")
    assert schema.resolve_property("HP21", "has type")[0].code == "HP21"
    assert schema.resolve_property("crm:P2", "has type")[0].code == "crm:P2"


def test_unknown_property(schema):
    with pytest.raises(UnknownProperty):
        schema.resolve_property("HP1", "teleports to")
    with pytest.raises(UnknownProperty):
        schema.resolve_property("HP1", "  ")


def test_superproperties(schema):
    for sub in ("HP5", "HP7", "HP24", "HP25"):
        assert "HP11" in schema.superproperties(sub)


def test_story_shortcut_flag():
    with_story = {r.parameters.get("source_property") for r in builtin_schema(True).rules}
    without = {r.parameters.get("source_property") for r in builtin_schema(False).rules}
    assert "HP6" in with_story and "HP6" not in without


def test_split_token():
    assert split_token("HC16 Tangible Asset") == ("HC16", "Tangible Asset")
    assert split_token("Pisa") == (None, "Pisa")
    assert split_token("crm:P2 has type") == ("crm:P2", "has type")


def test_dump_schema_sorted_and_stable(schema):
    text = dump_schema(schema)
    lines = text.splitlines()
    assert lines == sorted(lines)
    assert dump_schema(builtin_schema()) == text


def _mini(classes, props=(), rules=()):
    root = ClassDef("HC1", "Root", frozenset(), abstract=True)
    return Schema([root, *classes], props, rules)


def test_check_detects_cycle():
    a = ClassDef("HC2", "A", frozenset({"HC3"}))
    b = ClassDef("HC3", "B", frozenset({"HC2"}))
    codes = {d.code for d in check_schema(_mini([a, b]))}
    assert "CycleDetected" in codes


def test_check_detects_undeclared_and_duplicate():
    a = ClassDef("HC2", "A", frozenset({"HC9"}))
    dup = ClassDef("HC2", "A again", frozenset({"HC1"}))
    codes = {d.code for d in check_schema(_mini([a, dup]))}
    assert {"UndeclaredReference", "DuplicateCode"} <= codes


def test_check_name_collision_and_symmetry():
    a = ClassDef("HC2", "A", frozenset({"HC1"}))
    b = ClassDef("HC3", "B", frozenset({"HC1"}))
    p = PropertyDef("HP1", "links", "is linked by", "HC2", "HC3", symmetric=True)
    q = PropertyDef("HP2", "links", "other", "HC2", "HC2")
    codes = {d.code for d in check_schema(_mini([a, b], [p, q]))}
    assert {"NameCollision", "SymmetryMismatch"} <= codes


def test_check_unknown_rule_and_domain_conflict():
    a = ClassDef("HC2", "A", frozenset({"HC1"}))
    b = ClassDef("HC3", "B", frozenset({"HC1"}))
    sup = PropertyDef("HP1", "has", "of", "HC2", "HC2")
    sub = PropertyDef("HP2", "holds", "held by", "HC3", "HC2", direct_superproperties=frozenset({"HP1"}))
    diags = check_schema(_mini([a, b], [sup, sub], [InferenceRuleDecl("Magic")]))
    codes = {d.code for d in diags}
    assert {"UnknownRule", "DomainConflict"} <= codes


def test_check_missing_root():
    orphan = ClassDef("HC2", "Orphan", frozenset())
    assert "MissingRoot" in {d.code for d in check_schema(_mini([orphan]))}


@settings(max_examples=60)
@given(st.sampled_from(sorted(builtin_schema().classes)), st.sampled_from(sorted(builtin_schema().classes)))
def test_subclass_is_transitive(a, b):
    schema = builtin_schema()
    if schema.is_subclass(a, b):
        assert schema.superclasses(b) <= schema.superclasses(a)


@settings(max_examples=60)
@given(st.sampled_from(builtin_schema().property_list))
def test_every_surface_name_resolves_back(pdef):
    schema = builtin_schema()
    for name, direction in pdef.surface_names():
        got, got_dir, _ = schema.resolve_property(pdef.code, name)
        assert got.code == pdef.code
        if not pdef.symmetric:
            assert got_dir == direction


def test_classdef_is_frozen(schema):
    with pytest.raises(dataclasses.FrozenInstanceError):
        schema.cls("HC2").name = "x"
