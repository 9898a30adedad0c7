"""Typed instance/statement store with domain/range validation."""

from __future__ import annotations

import contextlib
import copy
import enum
from dataclasses import dataclass, field
from typing import Optional

from .errors import (
    ERROR,
    WARNING,
    AbstractClassInstantiation,
    Diagnostic,
    DomainViolation,
    RangeViolation,
    SchemaInvalid,
    UnknownInstance,
    UnknownStatement,
)
from .schema import Direction, Schema, check_schema

ASSERTED = "Asserted"


class Mode(enum.Enum):
    STRICT = "strict"
    LENIENT = "lenient"


@dataclass
class Instance:
    id: int
    name: str
    direct_classes: set
    description: Optional[str] = None
    literal_value: Optional[str] = None

    @property
    def is_literal(self) -> bool:
        return self.literal_value is not None

    @property
    def key(self):
        """Identity independent of the numeric id."""
        if self.is_literal:
            return ("literal", min(self.direct_classes), self.literal_value)
        return ("named", self.name)


@dataclass
class Statement:
    id: int
    subject: int
    property: str
    object: int
    rule: Optional[str] = None  # None for asserted statements
    diagnostics: list = field(default_factory=list)

    @property
    def inferred(self) -> bool:
        return self.rule is not None

    @property
    def provenance(self) -> str:
        return ASSERTED if self.rule is None else f"Inferred({self.rule})"

    @property
    def triple(self):
        return (self.subject, self.property, self.object)


class KnowledgeBase:
    """Instances and canonical-direction statements over a fixed schema.

    Mutations need exclusive access; readers may share a KB between them.
    """

    def __init__(self, schema: Schema, mode: Mode = Mode.LENIENT):
        errors = [d for d in check_schema(schema) if d.severity == ERROR]
        if errors:
            raise SchemaInvalid("; ".join(d.message for d in errors))
        self.schema = schema
        self.mode = Mode(mode)
        self.instances: dict = {}
        self.statements: dict = {}
        self._named: dict = {}
        self._literals: dict = {}
        self._spo: dict = {}
        self._next_instance = 1
        self._next_statement = 1
        # filled in by inference.entail
        self.entailed = False
        self.derivations: dict = {}
        self.class_closure: dict = {}

    def copy(self) -> "KnowledgeBase":
        return copy.deepcopy(self)

    @contextlib.contextmanager
    def atomic(self):
        """Roll every change back if the block raises."""
        saved = {k: copy.deepcopy(v) for k, v in self.__dict__.items() if k != "schema"}
        try:
            yield self
        except BaseException:
            self.__dict__.update(saved)
            raise

    # instances -------------------------------------------------------------

    def instance(self, instance_id: int) -> Instance:
        try:
            return self.instances[instance_id]
        except KeyError:
            raise UnknownInstance(f"no instance with id {instance_id!r}", ref=str(instance_id)) from None

    def find(self, name: str, class_code: Optional[str] = None) -> Optional[int]:
        """Id of the instance called ``name`` (named first, then literal values)."""
        if class_code is not None and self.schema.is_literal_valued(class_code):
            return self._literals.get((class_code, name))
        if name in self._named:
            return self._named[name]
        hits = sorted(i for (c, v), i in self._literals.items()
                      if v == name and (class_code is None or c == class_code))
        return hits[0] if len(hits) == 1 else None

    def assert_instance(self, name: str, class_token: str):
        """Create or extend an instance; returns ``(instance id, diagnostics)``.

        Literal-valued classes key instances by ``(class, value)``; other
        instances are identified by display name.
        """
        cdef, diags = self.schema.resolve_class(class_token)
        if cdef.abstract:
            raise AbstractClassInstantiation(f"{cdef.label} has no instances; cannot type {name!r}", ref=cdef.code)
        name = name.strip()
        if cdef.literal_valued:
            key = (cdef.code, name)
            iid = self._literals.get(key)
            if iid is None:
                iid = self._new_instance(name, cdef.code, literal_value=name)
                self._literals[key] = iid
            return iid, diags
        iid = self._named.get(name)
        if iid is None:
            iid = self._new_instance(name, cdef.code)
            self._named[name] = iid
        else:
            inst = self.instances[iid]
            if cdef.code not in inst.direct_classes:
                inst.direct_classes.add(cdef.code)
                diags = diags + [Diagnostic(
                    "MultiTyped", WARNING,
                    f"{name!r} typed {', '.join(sorted(inst.direct_classes))}", ref=name)]
        return iid, diags

    def _new_instance(self, name, class_code, literal_value=None) -> int:
        iid = self._next_instance
        self._next_instance += 1
        self.instances[iid] = Instance(iid, name, {class_code}, literal_value=literal_value)
        return iid

    def set_description(self, instance_id: int, text: str) -> None:
        self.instance(instance_id).description = text

    def classes_of(self, instance_id: int, transitive: bool = False) -> frozenset:
        inst = self.instance(instance_id)
        if not transitive:
            return frozenset(inst.direct_classes)
        out = set()
        for c in inst.direct_classes:
            out |= self.schema.superclasses(c)
        return frozenset(out)

    def instances_of(self, class_code: str):
        """Ids whose transitive classes include ``class_code``, in id order."""
        return [i for i in sorted(self.instances) if class_code in self.classes_of(i, transitive=True)]

    # statements ------------------------------------------------------------

    def statement(self, statement_id: int) -> Statement:
        try:
            return self.statements[statement_id]
        except KeyError:
            raise UnknownStatement(f"no statement with id {statement_id!r}", ref=str(statement_id)) from None

    def find_statement(self, subject: int, prop: str, obj: int) -> Optional[Statement]:
        sid = self._spo.get((subject, prop, obj))
        return None if sid is None else self.statements[sid]

    def check_statement(self, subject: int, prop: str, obj: int) -> list:
        """Domain/range diagnostics for a canonical-direction triple."""
        pdef = self.schema.prop(prop)
        out = []
        subj, objc = self.instance(subject), self.instance(obj)
        if pdef.domain not in self.classes_of(subject, transitive=True):
            out.append(Diagnostic(
                "DomainViolation", WARNING,
                f"{subj.name!r} ({', '.join(sorted(subj.direct_classes))}) is outside the domain "
                f"{pdef.domain} of {pdef.code} {pdef.forward_name!r}", ref=pdef.code))
        rng = pdef.checked_range
        if rng not in self.classes_of(obj, transitive=True):
            out.append(Diagnostic(
                "RangeViolation", WARNING,
                f"{objc.name!r} ({', '.join(sorted(objc.direct_classes))}) is outside the range "
                f"{rng} of {pdef.code} {pdef.forward_name!r}", ref=pdef.code))
        return out

    def assert_statement(self, subject_id: int, property_code: str, direction: Direction,
                         object_id: int):
        """Store a statement in canonical direction; returns ``(id, diagnostics)``.

        Strict mode raises on domain/range violations; lenient mode stores
        the statement with the violations attached.
        """
        pdef = self.schema.prop(property_code)
        self.instance(subject_id)
        self.instance(object_id)
        direction = Direction(direction)
        if direction is Direction.INVERSE:
            subject_id, object_id = object_id, subject_id
        diags = self.check_statement(subject_id, pdef.code, object_id)
        if diags and self.mode is Mode.STRICT:
            first = diags[0]
            exc = DomainViolation if first.code == "DomainViolation" else RangeViolation
            raise exc(first.message, ref=first.ref)
        existing = self.find_statement(subject_id, pdef.code, object_id)
        if existing is not None:
            if existing.inferred:
                existing.rule = None
                existing.diagnostics = list(diags)
            return existing.id, list(existing.diagnostics)
        sid = self._add_statement(subject_id, pdef.code, object_id, rule=None)
        self.statements[sid].diagnostics = list(diags)
        return sid, diags

    def _add_statement(self, subject, prop, obj, rule) -> int:
        sid = self._next_statement
        self._next_statement += 1
        self.statements[sid] = Statement(sid, subject, prop, obj, rule)
        self._spo[(subject, prop, obj)] = sid
        return sid

    def add_inferred(self, subject: int, prop: str, obj: int, rule: str) -> Optional[int]:
        """Add a derived statement unless the triple already exists."""
        if (subject, prop, obj) in self._spo:
            return None
        return self._add_statement(subject, prop, obj, rule)

    def asserted(self):
        return [s for _, s in sorted(self.statements.items()) if not s.inferred]

    # queries ---------------------------------------------------------------

    def query(self, subject: Optional[int] = None, property: Optional[str] = None,
              object: Optional[int] = None, direction: Direction = Direction.FORWARD,
              with_inference: bool = False):
        """Statements matching the bound fields, ordered by statement id.

        ``Direction.INVERSE`` reads the pattern with subject and object
        swapped; symmetric properties match either orientation.
        """
        for iid in (subject, object):
            if iid is not None:
                self.instance(iid)
        symmetric = False
        if property is not None:
            symmetric = self.schema.prop(property).symmetric
        direction = Direction(direction)

        def fits(s: Statement, subj, obj) -> bool:
            return (subj is None or s.subject == subj) and (obj is None or s.object == obj)

        out = []
        for sid in sorted(self.statements):
            s = self.statements[sid]
            if s.inferred and not with_inference:
                continue
            if property is not None and s.property != property:
                continue
            fwd = fits(s, subject, object)
            inv = fits(s, object, subject)
            if direction is Direction.EITHER or symmetric:
                ok = fwd or inv
            elif direction is Direction.FORWARD:
                ok = fwd
            else:
                ok = inv
            if ok:
                out.append(s)
        return out

    def validate(self) -> list:
        """Domain/range re-check of every asserted statement."""
        out = []
        for s in self.asserted():
            for d in self.check_statement(s.subject, s.property, s.object):
                out.append(Diagnostic(d.code, d.severity, f"statement {s.id}: {d.message}", ref=d.ref))
        return out

    # comparison ------------------------------------------------------------

    def signature(self, include_inferred: bool = False):
        """Id-free description of the graph, for isomorphism checks."""
        nodes = frozenset(
            (inst.key, frozenset(inst.direct_classes), inst.description)
            for inst in self.instances.values())
        edges = frozenset(
            (self.instances[s.subject].key, s.property, self.instances[s.object].key)
            for s in self.statements.values() if include_inferred or not s.inferred)
        return nodes, edges

    def label(self, instance_id: int) -> str:
        return self.instance(instance_id).name

    def __repr__(self) -> str:
        return (f"KnowledgeBase(mode={self.mode.value}, instances={len(self.instances)}, "
                f"statements={len(self.statements)})")


def new_kb(schema: Schema, mode: Mode = Mode.LENIENT) -> KnowledgeBase:
    return KnowledgeBase(schema, mode)


def isomorphic(a: KnowledgeBase, b: KnowledgeBase, include_inferred: bool = False) -> bool:
    return a.signature(include_inferred) == b.signature(include_inferred)
