from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hdtkg.errors import (
    AbstractClassInstantiation,
    DomainViolation,
    RangeViolation,
    UnknownInstance,
    UnknownStatement,
)
from hdtkg.kb import KnowledgeBase, Mode, isomorphic
from hdtkg.schema import Direction, builtin_schema

from helpers import random_kb


@pytest.fixture
def kb():
    return KnowledgeBase(builtin_schema(), Mode.LENIENT)


@pytest.fixture
def strict():
    return KnowledgeBase(builtin_schema(), Mode.STRICT)


def test_instances_keyed_by_name(kb):
    a, _ = kb.assert_instance("Pafos Gate", "HC16 Tangible Asset")
    b, _ = kb.assert_instance("Pafos Gate", "HC16")
    assert a == b
    assert len(kb.instances) == 1


def test_literals_keyed_by_class_and_value(kb):
    t1, _ = kb.assert_instance("1234", "HC12 Heritage Title")
    t2, _ = kb.assert_instance("1234", "HC11 Heritage Identifier")
    t3, _ = kb.assert_instance("1234", "HC12")
    assert t1 == t3 != t2
    assert kb.instances[t1].is_literal


def test_abstract_class_rejected(kb):
    with pytest.raises(AbstractClassInstantiation):
        kb.assert_instance("Anything", "HC1 Heritage Entity")


def test_multityped_warning(kb):
    kb.assert_instance("Scan", "HC19 Heritage Digital Document")
    iid, diags = kb.assert_instance("Scan", "HC7 3D Model")
    assert [d.code for d in diags] == ["MultiTyped"]
    assert kb.classes_of(iid) == {"HC19", "HC7"}


def test_classes_transitive(kb):
    iid, _ = kb.assert_instance("Gate", "HC16")
    closure = kb.classes_of(iid, transitive=True)
    assert {"HC16", "HC2", "HC1", "crm:E18", "crm:E1"} <= closure
    assert kb.instances_of("HC2") == [iid]


def test_inverse_direction_is_stored_canonically(kb):
    gate, _ = kb.assert_instance("Gate", "HC16")
    twin, _ = kb.assert_instance("Twin", "HC3")
    sid, _ = kb.assert_statement(twin, "HP1", Direction.INVERSE, gate)
    s = kb.statement(sid)
    assert (s.subject, s.property, s.object) == (gate, "HP1", twin)
    assert [x.id for x in kb.query(subject=twin, property="HP1", direction=Direction.INVERSE)] == [sid]


def test_duplicate_statement_is_noop(kb):
    gate, _ = kb.assert_instance("Gate", "HC16")
    twin, _ = kb.assert_instance("Twin", "HC3")
    first, _ = kb.assert_statement(gate, "HP1", Direction.FORWARD, twin)
    second, _ = kb.assert_statement(twin, "HP1", Direction.INVERSE, gate)
    assert first == second and len(kb.statements) == 1


def test_strict_raises_domain_and_range(strict):
    tower, _ = strict.assert_instance("Tower", "HC2 Heritage Asset")
    pisa, _ = strict.assert_instance("Pisa", "HC13")
    with pytest.raises(DomainViolation):
        strict.assert_statement(tower, "HP12", Direction.FORWARD, pisa)
    gate, _ = strict.assert_instance("Gate", "HC16")
    with pytest.raises(RangeViolation):
        strict.assert_statement(gate, "HP12", Direction.FORWARD, tower)
    assert strict.statements == {}


def test_lenient_attaches_diagnostics(kb):
    tower, _ = kb.assert_instance("Tower", "HC2 Heritage Asset")
    pisa, _ = kb.assert_instance("Pisa", "HC13")
    sid, diags = kb.assert_statement(tower, "HP12", Direction.FORWARD, pisa)
    assert [d.code for d in diags] == ["DomainViolation"]
    assert [d.code for d in kb.validate()] == ["DomainViolation"]
    assert kb.statement(sid).diagnostics == diags


def test_domain_uses_membership_of_any_direct_class(kb):
    both, _ = kb.assert_instance("Thing", "HC2")
    kb.assert_instance("Thing", "HC16")
    place, _ = kb.assert_instance("Place", "HC13")
    _, diags = kb.assert_statement(both, "HP12", Direction.FORWARD, place)
    assert diags == []


def test_subproperties_of_has_component_use_widened_range(kb):
    twin, _ = kb.assert_instance("Twin", "HC3")
    story, _ = kb.assert_instance("Story", "HC14")
    _, diags = kb.assert_statement(twin, "HP11", Direction.FORWARD, story)
    assert diags == []


def test_symmetric_query_matches_both_orientations(kb):
    a, _ = kb.assert_instance("A", "HC2")
    b, _ = kb.assert_instance("B", "HC2")
    sid, _ = kb.assert_statement(a, "HP3", Direction.FORWARD, b)
    assert [s.id for s in kb.query(subject=b, property="HP3")] == [sid]


def test_unknown_ids(kb):
    with pytest.raises(UnknownInstance):
        kb.instance(42)
    with pytest.raises(UnknownStatement):
        kb.statement(42)
    with pytest.raises(UnknownInstance):
        kb.query(subject=42)


def test_atomic_rolls_back(kb):
    kb.assert_instance("Keep", "HC2")
    with pytest.raises(RuntimeError):
        with kb.atomic():
            kb.assert_instance("Drop", "HC2")
            raise RuntimeError("boom")
    assert [i.name for i in kb.instances.values()] == ["Keep"]
    assert kb.find("Drop") is None


def test_copy_is_independent(kb):
    kb.assert_instance("A", "HC2")
    other = kb.copy()
    other.assert_instance("B", "HC2")
    assert len(kb.instances) == 1 and other.schema is kb.schema


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_isomorphism_ignores_insertion_order(seed):
    kb = random_kb(random.Random(seed))
    shuffled = KnowledgeBase(kb.schema)
    rng = random.Random(seed + 1)
    insts = list(kb.instances.values())
    rng.shuffle(insts)
    for inst in insts:
        for c in sorted(inst.direct_classes):
            iid, _ = shuffled.assert_instance(inst.name, c)
        if inst.description is not None:
            shuffled.set_description(iid, inst.description)
    stmts = list(kb.statements.values())
    rng.shuffle(stmts)

    def ident(k, iid):
        inst = k.instances[iid]
        return shuffled.find(inst.name, min(inst.direct_classes) if inst.is_literal else None)

    for s in stmts:
        shuffled.assert_statement(ident(kb, s.subject), s.property, Direction.FORWARD, ident(kb, s.object))
    assert isomorphic(kb, shuffled)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_validate_matches_stored_diagnostics(seed):
    kb = random_kb(random.Random(seed))
    stored = sorted((s.id, d.code) for s in kb.asserted() for d in s.diagnostics)
    fresh = sorted((int(d.message.split(":")[0].split()[1]), d.code) for d in kb.validate())
    assert stored == fresh
