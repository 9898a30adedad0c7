"""Ontology vocabulary: class/property registry, token resolution, sanity checks.

The builtin registry carries the 21 heritage classes (HC1-HC21), the 32
heritage properties (HP1-HP32) and the small CIDOC CRM subset that the
bundled fixtures refer to.
"""

from __future__ import annotations

import enum
import functools
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import (
    ERROR,
    INFO,
    WARNING,
    AmbiguousName,
    Diagnostic,
    UnknownClass,
    UnknownProperty,
)

HDT = "hdt"
CRM = "crm"

SUBSUMPTION = "Subsumption"
INVERSE = "Inverse"
SYMMETRY = "Symmetry"
SUPERPROPERTY = "Superproperty"
TWIN_SHORTCUT = "TwinShortcut"
DIGITAL_PART = "DigitalPart"
RULE_IDS = (SUBSUMPTION, INVERSE, SYMMETRY, SUPERPROPERTY, TWIN_SHORTCUT, DIGITAL_PART)

ROOT_CLASS = "HC1"
TWIN_CLASS = "HC3"
TWIN_PROPERTY = "HP1"


class Direction(enum.Enum):
    FORWARD = "Forward"
    INVERSE = "Inverse"
    EITHER = "Either"


@dataclass(frozen=True)
class ClassDef:
    code: str
    name: str
    direct_superclasses: frozenset = frozenset()
    abstract: bool = False
    namespace: str = HDT
    literal_valued: bool = False
    code_aliases: tuple = ()
    name_aliases: tuple = ()
    description: str = ""

    @property
    def label(self) -> str:
        return f"{self.code} {self.name}"


@dataclass(frozen=True)
class PropertyDef:
    code: str
    forward_name: str
    inverse_name: str
    domain: str
    range: str
    symmetric: bool = False
    direct_superproperties: frozenset = frozenset()
    namespace: str = HDT
    forward_aliases: tuple = ()
    inverse_aliases: tuple = ()
    # Range actually enforced; set when subproperties legitimately exceed the declared one.
    effective_range: Optional[str] = None

    @property
    def checked_range(self) -> str:
        return self.effective_range or self.range

    def surface_names(self):
        for n in (self.forward_name, *self.forward_aliases):
            yield n, Direction.FORWARD
        for n in (self.inverse_name, *self.inverse_aliases):
            yield n, Direction.INVERSE


@dataclass(frozen=True)
class InferenceRuleDecl:
    rule_id: str
    parameters: dict = field(default_factory=dict)

    def referenced_properties(self):
        return [v for k, v in sorted(self.parameters.items()) if k.endswith("property")]


_CODE_RE = re.compile(
    r"^\s*(?:(?P<ns>[A-Za-z]+):)?(?P<letters>[A-Z]{1,3})\s?(?P<num>\d+)(?=\s|$)\s*(?P<rest>.*?)\s*$"
)
_HDT_LETTERS = {"H", "HC", "HP"}


def normalize_code(ns: Optional[str], letters: str, num: str) -> str:
    code = f"{letters}{int(num)}"
    if ns:
        ns = ns.lower()
        return code if ns == HDT else f"{ns}:{code}"
    if letters in _HDT_LETTERS:
        return code
    return f"{CRM}:{code}"


def split_token(token: str):
    """Split ``"HC16 Tangible Asset"`` into ``("HC16", "Tangible Asset")``.

    Returns ``(None, text)`` when no code leads the token.
    """
    m = _CODE_RE.match(token)
    if not m:
        return None, token.strip()
    return normalize_code(m["ns"], m["letters"], m["num"]), m["rest"]


def _namespace_of(code: str) -> str:
    return code.split(":", 1)[0] if ":" in code else HDT


def _fold(name: str) -> str:
    return " ".join(name.split()).casefold()


class Schema:
    """Immutable registry of classes, properties and rule declarations."""

    def __init__(self, classes: Iterable[ClassDef], properties: Iterable[PropertyDef],
                 rules: Iterable[InferenceRuleDecl] = (), flags: Optional[dict] = None):
        self.class_list = tuple(classes)
        self.property_list = tuple(properties)
        self.rules = tuple(rules)
        self.flags = dict(flags or {})
        self.classes = {}
        for c in self.class_list:
            self.classes.setdefault(c.code, c)
        self.properties = {}
        for p in self.property_list:
            self.properties.setdefault(p.code, p)

        self._class_codes = {}
        self._class_names = {}
        for c in self.classes.values():
            for code in (c.code, *c.code_aliases):
                self._class_codes.setdefault(code, c.code)
            for name in (c.name, *c.name_aliases):
                self._class_names.setdefault(_fold(name), []).append(c.code)

        self._prop_names = {}
        for p in self.properties.values():
            for name, direction in p.surface_names():
                entries = self._prop_names.setdefault(_fold(name), [])
                if (p.code, direction) not in entries:
                    entries.append((p.code, direction))

        self._super_cache = {}
        self._superprop_cache = {}

    def __deepcopy__(self, memo):
        return self

    # lookups ---------------------------------------------------------------

    def cls(self, code: str) -> ClassDef:
        try:
            return self.classes[code]
        except KeyError:
            raise UnknownClass(f"undeclared class {code!r}", ref=code) from None

    def prop(self, code: str) -> PropertyDef:
        try:
            return self.properties[code]
        except KeyError:
            raise UnknownProperty(f"undeclared property {code!r}", ref=code) from None

    def is_literal_valued(self, code: str) -> bool:
        return self.cls(code).literal_valued

    def property_names(self):
        """All surface names of every property (forward, inverse and aliases)."""
        return list(self._prop_names)

    def names_of(self, code: str):
        return [n for n, _ in self.prop(code).surface_names()]

    def same_named_properties(self, code: str):
        """Other properties sharing a surface name with ``code``."""
        out = set()
        for name in self.names_of(code):
            for other, _ in self._prop_names.get(_fold(name), []):
                if other != code:
                    out.add(other)
        return sorted(out)

    # closures --------------------------------------------------------------

    def superclasses(self, code: str) -> frozenset:
        if code not in self._super_cache:
            if code not in self.classes:
                raise UnknownClass(f"undeclared class {code!r}", ref=code)
            seen = set()
            stack = [code]
            while stack:
                c = stack.pop()
                if c in seen:
                    continue
                seen.add(c)
                cdef = self.classes.get(c)
                if cdef is not None:
                    stack.extend(cdef.direct_superclasses)
            self._super_cache[code] = frozenset(seen)
        return self._super_cache[code]

    def is_subclass(self, sub: str, sup: str) -> bool:
        return sup in self.superclasses(sub)

    def superproperties(self, code: str) -> frozenset:
        if code not in self._superprop_cache:
            self.prop(code)
            seen = set()
            stack = [code]
            while stack:
                p = stack.pop()
                if p in seen:
                    continue
                seen.add(p)
                pdef = self.properties.get(p)
                if pdef is not None:
                    stack.extend(pdef.direct_superproperties)
            self._superprop_cache[code] = frozenset(seen)
        return self._superprop_cache[code]

    def rules_of(self, rule_id: str):
        return [r for r in self.rules if r.rule_id == rule_id]

    # resolution ------------------------------------------------------------

    def resolve_class(self, token: str):
        """Resolve a class token; returns ``(ClassDef, diagnostics)``.

        The name is authoritative when code and name disagree.
        """
        code, name = split_token(token)
        by_code = self._class_codes.get(code) if code else None
        by_name = None
        if name:
            hits = self._class_names.get(_fold(name), [])
            if len(hits) > 1 and code:
                ns = _namespace_of(code)
                hits = [h for h in hits if self.classes[h].namespace == ns] or hits
            if len(hits) > 1:
                raise AmbiguousName(f"class name {name!r} matches {', '.join(sorted(hits))}", ref=name)
            by_name = hits[0] if hits else None

        if by_name is None and by_code is None:
            raise UnknownClass(f"unknown class {token.strip()!r}", ref=token.strip())
        diags = []
        chosen = by_name or by_code
        if code and (chosen != code or (by_name is None and name)):
            diags.append(Diagnostic(
                "LabelNormalized", WARNING,
                f"class label {token.strip()!r} normalized to {self.classes[chosen].label!r}",
                ref=chosen))
        return self.classes[chosen], diags

    def resolve_property(self, token: Optional[str], name_text: str):
        """Resolve a property by code and surface name.

        Returns ``(PropertyDef, Direction, diagnostics)``; the direction tells
        whether the text used the forward or the inverse reading.
        """
        if not name_text or not name_text.strip():
            raise UnknownProperty("empty property name")
        code = None
        if token:
            code, rest = split_token(token)
            if code is None:
                raise UnknownProperty(f"malformed property code {token!r}", ref=token)
        hits = list(self._prop_names.get(_fold(name_text), []))
        label = f"{token} {name_text}".strip() if token else name_text
        if not hits:
            raise UnknownProperty(f"unknown property {label!r}", ref=code or name_text)

        exact = [h for h in hits if h[0] == code]
        if exact:
            hits = exact
        elif code is not None:
            ns = _namespace_of(code)
            hits = [h for h in hits if self.properties[h[0]].namespace == ns] or hits
        if len({h[0] for h in hits}) > 1:
            raise AmbiguousName(
                f"property name {name_text!r} matches {', '.join(sorted({h[0] for h in hits}))}",
                ref=name_text)
        pcode, direction = hits[0]
        diags = []
        if code is not None and pcode != code:
            diags.append(Diagnostic(
                "LabelNormalized", WARNING,
                f"property label {label!r} normalized to {pcode}", ref=pcode))
        return self.properties[pcode], direction, diags


def resolve_class(schema: Schema, token: str):
    return schema.resolve_class(token)


def resolve_property(schema: Schema, token: Optional[str], name_text: str):
    return schema.resolve_property(token, name_text)


def superclasses(schema: Schema, class_code: str) -> frozenset:
    return schema.superclasses(class_code)


# checks ----------------------------------------------------------------------

def _find_cycles(edges: dict) -> list:
    """Nodes lying on a cycle of the directed graph ``edges``."""
    color = {}
    on_cycle = set()
    for start in sorted(edges):
        if start in color:
            continue
        stack = [(start, iter(sorted(edges.get(start, ()))))]
        path = [start]
        color[start] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = 2
                stack.pop()
                path.pop()
                continue
            if nxt not in edges:
                continue
            state = color.get(nxt)
            if state == 1:
                on_cycle.update(path[path.index(nxt):])
            elif state is None:
                color[nxt] = 1
                path.append(nxt)
                stack.append((nxt, iter(sorted(edges.get(nxt, ())))))
    return sorted(on_cycle)


def check_schema(schema: Schema) -> list:
    """Structural diagnostics for a schema; errors make it unusable for a KB."""
    out = []

    def err(code, msg, ref=None):
        out.append(Diagnostic(code, ERROR, msg, ref=ref))

    seen = set()
    for c in schema.class_list:
        if c.code in seen:
            err("DuplicateCode", f"class code {c.code} declared twice", c.code)
        seen.add(c.code)
    seen_names = {}
    for c in schema.class_list:
        for name in (c.name, *c.name_aliases):
            key = (c.namespace, _fold(name))
            if key in seen_names and seen_names[key] != c.code:
                err("DuplicateName", f"class name {name!r} used by {seen_names[key]} and {c.code}", c.code)
            seen_names.setdefault(key, c.code)
    seen = set()
    for p in schema.property_list:
        if p.code in seen:
            err("DuplicateCode", f"property code {p.code} declared twice", p.code)
        seen.add(p.code)
    surface = {}
    for p in schema.properties.values():
        for name, direction in p.surface_names():
            key = (p.namespace, _fold(name))
            prev = surface.get(key)
            if prev is not None and prev != (p.code, direction) and not (prev[0] == p.code and p.symmetric):
                err("NameCollision", f"property name {name!r} used by {prev[0]} and {p.code}", p.code)
            surface.setdefault(key, (p.code, direction))

    for c in schema.classes.values():
        for sup in sorted(c.direct_superclasses):
            if sup not in schema.classes:
                err("UndeclaredReference", f"{c.code} subclass of undeclared {sup}", c.code)
    for node in _find_cycles({c.code: c.direct_superclasses for c in schema.classes.values()}):
        err("CycleDetected", f"class {node} lies on a subsumption cycle", node)
    if ROOT_CLASS in schema.classes:
        for c in schema.classes.values():
            if c.namespace == HDT and ROOT_CLASS not in schema.superclasses(c.code):
                err("MissingRoot", f"{c.code} does not reach {ROOT_CLASS}", c.code)

    for p in schema.properties.values():
        for role, ref in (("domain", p.domain), ("range", p.range)):
            if ref not in schema.classes:
                err("UndeclaredReference", f"{p.code} {role} {ref} is undeclared", p.code)
        if p.effective_range and p.effective_range not in schema.classes:
            err("UndeclaredReference", f"{p.code} effective range {p.effective_range} is undeclared", p.code)
        if p.symmetric and p.domain != p.range:
            err("SymmetryMismatch", f"symmetric {p.code} has domain {p.domain} != range {p.range}", p.code)
        for sup in sorted(p.direct_superproperties):
            if sup not in schema.properties:
                err("UndeclaredReference", f"{p.code} subproperty of undeclared {sup}", p.code)
    for node in _find_cycles({p.code: p.direct_superproperties for p in schema.properties.values()}):
        err("CycleDetected", f"property {node} lies on a subproperty cycle", node)

    widened = set()
    for p in schema.properties.values():
        if p.domain not in schema.classes or p.range not in schema.classes:
            continue
        for sup_code in sorted(p.direct_superproperties):
            sup = schema.properties.get(sup_code)
            if sup is None or sup.domain not in schema.classes or sup.range not in schema.classes:
                continue
            if not schema.is_subclass(p.domain, sup.domain):
                err("DomainConflict", f"{p.code} domain {p.domain} not within {sup.code} domain {sup.domain}", p.code)
            if not schema.is_subclass(p.range, sup.range):
                if sup.effective_range in schema.classes and schema.is_subclass(p.range, sup.effective_range):
                    widened.add(sup.code)
                else:
                    err("RangeConflict", f"{p.code} range {p.range} not within {sup.code} range {sup.range}", p.code)
    for code in sorted(widened):
        sup = schema.properties[code]
        out.append(Diagnostic(
            "RangeWidened", WARNING,
            f"{code} declared range {sup.range} widened to {sup.effective_range} for its subproperties",
            ref=code))

    for r in schema.rules:
        if r.rule_id not in RULE_IDS:
            err("UnknownRule", f"unknown rule kind {r.rule_id!r}")
            continue
        for ref in r.referenced_properties():
            if ref not in schema.properties:
                err("UndeclaredReference", f"{r.rule_id} references undeclared {ref}", ref)
        if r.rule_id == TWIN_SHORTCUT:
            target = schema.properties.get(r.parameters.get("target_property"))
            if target is not None and target.domain != TWIN_CLASS:
                err("ShortcutDomain", f"shortcut target {target.code} has domain {target.domain}, not {TWIN_CLASS}",
                    target.code)
    return sorted(out, key=Diagnostic.sort_key)


def dump_schema(schema: Schema) -> str:
    """Sorted tab-separated listing, one class or property per line."""
    lines = []
    for c in schema.classes.values():
        lines.append("\t".join([
            "class", c.code, c.name, ",".join(sorted(c.direct_superclasses)) or "-",
            "abstract" if c.abstract else "concrete", c.namespace,
            "literal" if c.literal_valued else "-",
        ]))
    for p in schema.properties.values():
        lines.append("\t".join([
            "property", p.code, p.forward_name, p.inverse_name, p.domain, p.checked_range,
            "symmetric" if p.symmetric else "-", ",".join(sorted(p.direct_superproperties)) or "-",
            p.namespace,
        ]))
    for r in schema.rules:
        params = ",".join(f"{k}={v}" for k, v in sorted(r.parameters.items()))
        lines.append("\t".join(["rule", r.rule_id, params or "-"]))
    return "\n".join(sorted(lines)) + "\n"


# builtin ---------------------------------------------------------------------

_CRM_CLASSES = [
    ("E1", "CRM Entity", ()),
    ("E3", "Condition State", ()),
    ("E5", "Event", ()),
    ("E7", "Activity", ()),
    ("E11", "Modification", ()),
    ("E18", "Physical Thing", ()),
    ("E28", "Conceptual Object", ()),
    ("E31", "Document", ()),
    ("E35", "Title", ()),
    ("E39", "Actor", ()),
    ("E42", "Identifier", ()),
    ("E53", "Place", ()),
    ("E55", "Type", ()),
    ("E77", "Persistent Item", ()),
    ("E89", "Propositional Object", ()),
    ("D1", "Digital Object", ()),
    ("D7", "Digital Machine Event", ("Digitization Machine Event",)),
    ("D9", "Data Object", ()),
    ("D14", "Software", ()),
    ("PE5", "Digital Hosting Service", ()),
]

# (number, name, superclasses, description)
_HDT_CLASSES = [
    (1, "Heritage Entity", ["crm:E1"], "Root of every heritage class; never instantiated."),
    (2, "Heritage Asset", ["HC1", "crm:E77"], "Heritage asset of any nature."),
    (3, "Heritage Digital Twin", ["HC1", "crm:D1"], "Collection of all digital objects pertaining to an asset."),
    (4, "Heritage Document", ["HC1", "crm:E31"], "Document concerning an asset."),
    (5, "Heritage Documenting", ["HC1", "crm:E7"], "Activity of collecting or digitizing documents."),
    (6, "Imagery", ["HC4", "crm:D1"], "Digital imagery about an asset."),
    (7, "3D Model", ["HC4", "crm:D1"], "3D digital model of an asset."),
    (8, "Heritage Event", ["HC1", "crm:E5"], "External event that may affect an asset."),
    (9, "Heritage Condition State", ["HC1", "crm:E3"], "Condition of an asset caused by an event."),
    (10, "Heritage Event Model", ["HC1", "crm:D1"], "Digital model of how an HC8 Heritage Event acts on assets."),
    (11, "Heritage Identifier", ["HC1", "crm:E42"], "Identifier of a heritage entity."),
    (12, "Heritage Title", ["HC1", "crm:E35"], "Title under which an asset is known."),
    (13, "Heritage Location", ["HC1", "crm:E53"], "Location of an asset."),
    (14, "Heritage Story", ["HC1", "crm:E89"], "Account about an asset."),
    (15, "Storytelling", ["HC1", "crm:E7"], "Activity of creating a story."),
    (16, "Tangible Asset", ["HC2", "crm:E18"], "Tangible part of an asset."),
    (17, "Intangible Asset", ["HC2", "crm:E28"], "Intangible part of an asset."),
    (18, "Heritage Analogical Document", ["HC4"], "Analogical document of an asset."),
    (19, "Heritage Digital Document", ["HC4", "crm:D9"], "Digital document of an asset."),
    (20, "Hosting Service", ["HC1", "crm:PE5"], "Platform hosting a digital twin."),
    (21, "Hosting Service Provider", ["HC1", "crm:E39"], "Owner of the hosting infrastructure."),
]

_LITERAL_CLASSES = {"HC11", "HC12", "crm:E55"}

# (number, forward, inverse, domain, range, extras)
_HDT_PROPERTIES = [
    (1, "has digital twin", "is digital twin of", "HC2", "HC3", {}),
    (2, "is documented in", "documents", "HC2", "HC4", {}),
    (3, "is related to", "relates", "HC2", "HC2", {"symmetric": True}),
    (4, "is part of", "is formed by part", "HC2", "HC2", {"inverse_aliases": ("has part",)}),
    (5, "includes document", "digital document is included in", "HC3", "HC4",
     {"super": ("HP11",), "inverse_aliases": ("document is included in",)}),
    (6, "has story", "is story about", "HC2", "HC14", {}),
    (7, "uses story", "story is used by", "HC3", "HC14", {"super": ("HP11",)}),
    (8, "created document", "is document created by", "HC5", "HC4", {}),
    (9, "creates story", "is story created by", "HC15", "HC14", {}),
    (10, "is identified by", "identifies", "HC1", "HC11", {}),
    (11, "has component", "is component of", "HC3", "HC4", {"effective_range": "HC1"}),
    (12, "is located in", "is location of", "HC16", "HC13", {}),
    (13, "has intangible component", "is intangible component of", "HC16", "HC17", {}),
    (14, "has manifestation event", "event is manifestation of", "HC17", "HC8", {}),
    (15, "is manifested by", "is manifestation of", "HC17", "HC16", {}),
    (16, "used document", "document used for", "HC15", "HC4", {}),
    (17, "has visual documentation", "is visual documentation of", "HC2", "HC6", {}),
    (18, "has 3D model", "is 3D model of", "HC16", "HC7", {}),
    (19, "narrates", "is narrated by", "HC14", "HC8", {}),
    (20, "depicts", "is depicted by", "HC6", "HC8", {}),
    (21, "has type", "is type of", "HC1", "crm:E55", {}),
    (22, "has condition state", "is condition state of", "HC16", "HC9", {}),
    (23, "tells about", "is told by", "HC14", "HC17", {}),
    (24, "includes visual documentation", "visual documentation is included in", "HC3", "HC6",
     {"super": ("HP11",)}),
    (25, "includes 3D documentation", "3D documentation is included in", "HC3", "HC7", {"super": ("HP11",)}),
    (26, "is digitization of", "was digitised to create", "HC19", "HC18", {}),
    (27, "is digital part of", "has digital part", "HC3", "HC3", {}),
    (28, "is hosted by", "hosts", "HC3", "HC20", {}),
    (29, "is provided by", "provides", "HC20", "HC21", {}),
    (30, "is titled", "titles", "HC1", "HC12", {}),
    (31, "happened at location", "was location for", "HC8", "HC13",
     {"forward_aliases": ("is happened at location",)}),
    (32, "was affected by", "affected", "HC2", "crm:E5", {}),
]

_CRM_PROPERTIES = [
    ("P2", "has type", "is type of", "crm:E1", "crm:E55"),
    ("P14", "carried out by", "performed", "crm:E1", "crm:E1"),
    ("P27", "moved from", "was origin of", "crm:E1", "crm:E1"),
    ("P28", "moved to", "was destination of", "crm:E1", "crm:E1"),
    ("P31", "has modified", "was modified by", "crm:E1", "crm:E1"),
    ("L10", "had input", "was input to", "crm:E1", "crm:E1"),
    ("L11", "had output", "was output of", "crm:E1", "crm:E1"),
    ("L23", "used software", "was software used by", "crm:E1", "crm:D14"),
]


@functools.lru_cache(maxsize=None)
def builtin_schema(story_shortcut: bool = True) -> Schema:
    """The fixed heritage registry.

    ``story_shortcut`` toggles the has-story -> uses-story twin shortcut,
    which generalizes the documented document/imagery shortcuts.
    """
    classes = []
    for code, name, aliases in _CRM_CLASSES:
        sup = frozenset() if code == "E1" else frozenset({"crm:E1"})
        classes.append(ClassDef(f"crm:{code}", name, sup, namespace=CRM,
                                literal_valued=f"crm:{code}" in _LITERAL_CLASSES, name_aliases=aliases))
    for num, name, sups, desc in _HDT_CLASSES:
        code = f"HC{num}"
        classes.append(ClassDef(
            code, name, frozenset(sups), abstract=(num == 1), namespace=HDT,
            literal_valued=code in _LITERAL_CLASSES,
            # HC18-HC21 are also printed with HP codes
            code_aliases=(f"HP{num}",) if num >= 18 else (),
            description=desc,
        ))

    props = []
    for num, fwd, inv, dom, rng, extra in _HDT_PROPERTIES:
        props.append(PropertyDef(
            f"HP{num}", fwd, inv, dom, rng,
            symmetric=extra.get("symmetric", False),
            direct_superproperties=frozenset(extra.get("super", ())),
            forward_aliases=extra.get("forward_aliases", ()),
            inverse_aliases=extra.get("inverse_aliases", ()),
            effective_range=extra.get("effective_range"),
        ))
    for code, fwd, inv, dom, rng in _CRM_PROPERTIES:
        props.append(PropertyDef(f"crm:{code}", fwd, inv, dom, rng, namespace=CRM))

    rules = [
        InferenceRuleDecl(SUBSUMPTION),
        InferenceRuleDecl(INVERSE),
        InferenceRuleDecl(SYMMETRY, {"property": "HP3"}),
    ]
    for p in props:
        for sup in sorted(p.direct_superproperties):
            rules.append(InferenceRuleDecl(SUPERPROPERTY, {"sub_property": p.code, "super_property": sup}))
    shortcuts = [("HP2", "HP5"), ("HP17", "HP24"), ("HP18", "HP25")]
    if story_shortcut:
        shortcuts.append(("HP6", "HP7"))
    for src, tgt in shortcuts:
        rules.append(InferenceRuleDecl(TWIN_SHORTCUT, {
            "source_property": src, "twin_property": TWIN_PROPERTY, "target_property": tgt}))
    rules.append(InferenceRuleDecl(DIGITAL_PART, {
        "part_property": "HP4", "twin_property": TWIN_PROPERTY, "target_property": "HP27"}))
    return Schema(classes, props, rules, flags={"story_shortcut": story_shortcut})
