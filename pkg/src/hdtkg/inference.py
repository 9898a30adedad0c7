"""Forward-chaining closure over the schema's declared rule kinds."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .kb import KnowledgeBase, Statement
from .schema import (
    DIGITAL_PART,
    SUPERPROPERTY,
    SYMMETRY,
    TWIN_SHORTCUT,
)


@dataclass(frozen=True)
class Derivation:
    conclusion: int
    rule: str
    premises: tuple


@dataclass
class DerivationNode:
    statement: Statement
    rule: Optional[str]
    premises: list = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return self.rule is None

    def render(self, kb: KnowledgeBase, indent: int = 0) -> str:
        s = self.statement
        text = (f"{'  ' * indent}[{s.id}] {kb.label(s.subject)} {s.property} "
                f"{kb.label(s.object)}  <- {self.rule or 'Asserted'}")
        return "\n".join([text] + [p.render(kb, indent + 1) for p in self.premises])


def _round(kb: KnowledgeBase, rules):
    """All conclusions derivable in one step from the current statements.

    Yields ``(subject, property, object, rule_id, premise ids)``.
    """
    by_prop: dict = {}
    for sid in sorted(kb.statements):
        s = kb.statements[sid]
        by_prop.setdefault(s.property, []).append(s)

    for r in rules:
        p = r.parameters
        if r.rule_id == SYMMETRY:
            for s in by_prop.get(p["property"], []):
                yield s.object, s.property, s.subject, SYMMETRY, (s.id,)
        elif r.rule_id == SUPERPROPERTY:
            for s in by_prop.get(p["sub_property"], []):
                yield s.subject, p["super_property"], s.object, SUPERPROPERTY, (s.id,)
        elif r.rule_id == TWIN_SHORTCUT:
            twins: dict = {}
            for t in by_prop.get(p["twin_property"], []):
                twins.setdefault(t.subject, []).append(t)
            for s in by_prop.get(p["source_property"], []):
                for t in twins.get(s.subject, []):
                    yield t.object, p["target_property"], s.object, TWIN_SHORTCUT, (s.id, t.id)
        elif r.rule_id == DIGITAL_PART:
            twins = {}
            for t in by_prop.get(p["twin_property"], []):
                twins.setdefault(t.subject, []).append(t)
            for s in by_prop.get(p["part_property"], []):
                for ta in twins.get(s.subject, []):
                    for tb in twins.get(s.object, []):
                        yield ta.object, p["target_property"], tb.object, DIGITAL_PART, (s.id, ta.id, tb.id)
        # Subsumption is served by transitive class lookups; inverses by canonical storage.


def entail(kb: KnowledgeBase) -> KnowledgeBase:
    """Least fixpoint of the rules, as a new KB; ``kb`` is left untouched.

    Derived statements are flagged with their rule; triples that are
    already present (asserted or derived) are never duplicated.
    """
    out = kb.copy()
    rules = list(out.schema.rules)
    while True:
        fresh = []
        seen = set()
        for subj, prop, obj, rule, premises in _round(out, rules):
            key = (subj, prop, obj)
            if key in seen or out.find_statement(*key) is not None:
                continue
            seen.add(key)
            fresh.append((subj, prop, obj, rule, premises))
        if not fresh:
            break
        for subj, prop, obj, rule, premises in fresh:
            sid = out.add_inferred(subj, prop, obj, rule)
            out.derivations[sid] = Derivation(sid, rule, premises)
    out.entailed = True
    out.class_closure = {i: out.classes_of(i, transitive=True) for i in sorted(out.instances)}
    return out


def explain(kb: KnowledgeBase, statement_id: int) -> DerivationNode:
    """Derivation tree of a statement; asserted statements are leaves."""
    s = kb.statement(statement_id)
    if not s.inferred:
        return DerivationNode(s, None)
    d = kb.derivations[statement_id]
    return DerivationNode(s, d.rule, [explain(kb, p) for p in d.premises])


def derivation_bound(kb: KnowledgeBase) -> int:
    """Upper bound on the statements a closure can hold."""
    return len(kb.schema.properties) * len(kb.instances) ** 2
