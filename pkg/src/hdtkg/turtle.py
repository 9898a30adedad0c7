"""Deterministic Turtle export, and re-import of the exported subset."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .errors import EmptySlug, UnknownClass, UnknownProperty, UnsupportedSyntax
from .kb import KnowledgeBase, Mode
from .schema import CRM, Direction, Schema

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"


@dataclass(frozen=True)
class IriPolicy:
    base_namespace: str = "http://example.org/heritage/instance/"
    hdt_namespace: str = "http://example.org/heritage/hdt/"
    crm_namespace: str = "http://www.cidoc-crm.org/cidoc-crm/"

    def prefixes(self):
        return [("hdt", self.hdt_namespace), ("crm", self.crm_namespace), ("ex", self.base_namespace),
                ("rdfs", RDFS_NS), ("rdf", RDF_NS)]


_NON_ALNUM = re.compile(r"[^0-9a-z]+")


def slugify(name: str) -> str:
    slug = _NON_ALNUM.sub("_", name.lower()).strip("_")
    if not slug:
        raise EmptySlug(f"nothing left of {name!r} after slugging", ref=name)
    return slug


def _vocab(code: str, name: str) -> str:
    """``HC16`` + ``Tangible Asset`` -> ``hdt:HC16_tangible_asset``."""
    if ":" in code:
        prefix, local = code.split(":", 1)
    else:
        prefix, local = "hdt", code
    return f"{prefix}:{local}_{slugify(name)}"


def class_iri(schema: Schema, code: str) -> str:
    return _vocab(code, schema.cls(code).name)


def property_iri(schema: Schema, code: str) -> str:
    return _vocab(code, schema.prop(code).forward_name)


def _escape(text: str) -> str:
    return '"' + (text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
                  .replace("\r", "\\r").replace("\t", "\\t")) + '"'


def assign_slugs(kb: KnowledgeBase) -> dict:
    """Unique slug per instance; clashes get ``_2``, ``_3``... in id order."""
    used = set()
    out = {}
    for iid in sorted(kb.instances):
        try:
            base = slugify(kb.instances[iid].name)
        except EmptySlug:
            base = "node"
        slug, n = base, 1
        while slug in used:
            n += 1
            slug = f"{base}_{n}"
        used.add(slug)
        out[iid] = slug
    return out


def export_turtle(kb: KnowledgeBase, include_inferred: bool = False,
                  policy: Optional[IriPolicy] = None) -> str:
    policy = policy or IriPolicy()
    schema = kb.schema
    lines = [f"@prefix {p}: <{ns}> ." for p, ns in policy.prefixes()]
    slugs = assign_slugs(kb)

    outgoing: dict = {}
    for s in kb.statements.values():
        if s.inferred and not include_inferred:
            continue
        outgoing.setdefault(s.subject, []).append(s)

    for iid in sorted(kb.instances, key=lambda i: slugs[i]):
        inst = kb.instances[iid]
        pairs = [("a", class_iri(schema, c), None) for c in sorted(inst.direct_classes, key=lambda c: class_iri(schema, c))]
        pairs.append(("rdfs:label", _escape(inst.name), None))
        if inst.description is not None:
            pairs.append(("rdfs:comment", _escape(inst.description), None))
        if inst.is_literal:
            pairs.append(("rdf:value", _escape(inst.literal_value), None))
        stmts = sorted(outgoing.get(iid, []),
                       key=lambda s: (property_iri(schema, s.property), slugs[s.object]))
        for s in stmts:
            pairs.append((property_iri(schema, s.property), f"ex:{slugs[s.object]}", s.rule))
        lines.append("")
        lines.append(f"ex:{slugs[iid]}")
        for i, (pred, obj, rule) in enumerate(pairs):
            end = " ." if i == len(pairs) - 1 else " ;"
            note = f"  # inferred: {rule}" if rule else ""
            lines.append(f"    {pred} {obj}{end}{note}")
    return "\n".join(lines) + "\n"


# import ------------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<prefix>@prefix\b)
  | (?P<iri><[^<>"{}|^`\\\s]*>)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<pname>(?:[A-Za-z][A-Za-z0-9_-]*)?:(?:[A-Za-z0-9_](?:[A-Za-z0-9_.-]*[A-Za-z0-9_-])?)?)
  | (?P<a>a(?=[\s;,.]))
  | (?P<punct>[;,.])
""", re.VERBOSE)

_UNESCAPE = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t", "'": "'"}


def _unescape(body: str, line: int) -> str:
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            nxt = body[i + 1]
            if nxt not in _UNESCAPE:
                raise UnsupportedSyntax(f"escape \\{nxt} outside the supported subset", line)
            out.append(_UNESCAPE[nxt])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _tokenize(text: str):
    pos = 0
    line = 1
    line_start = 0
    tokens = []
    inferred_lines = set()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise UnsupportedSyntax(f"unsupported syntax at column {col}: {text[pos:pos + 12]!r}", line)
        kind = m.lastgroup
        value = m.group()
        if kind == "string" and (text.startswith('"""', pos) or text[m.end():m.end() + 1] in ("@", "^")):
            raise UnsupportedSyntax(f"long strings, language tags and datatypes are unsupported (column {col})", line)
        if kind == "comment":
            if re.match(r"#\s*inferred:", value):
                inferred_lines.add(line)
        elif kind != "ws":
            tokens.append((kind, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    return tokens, inferred_lines


def _parse_triples(text: str):
    tokens, inferred_lines = _tokenize(text)
    prefixes = {}
    triples = []
    i = 0

    def expect(kinds, what):
        nonlocal i
        if i >= len(tokens):
            raise UnsupportedSyntax(f"unexpected end of input, wanted {what}")
        tok = tokens[i]
        if tok[0] not in kinds:
            raise UnsupportedSyntax(f"wanted {what}, found {tok[1]!r} at column {tok[3]}", tok[2])
        i += 1
        return tok

    while i < len(tokens):
        if tokens[i][0] == "prefix":
            i += 1
            name = expect({"pname"}, "prefix name")
            if not name[1].endswith(":"):
                raise UnsupportedSyntax(f"bad prefix name {name[1]!r}", name[2])
            iri = expect({"iri"}, "namespace IRI")
            dot = expect({"punct"}, "'.'")
            if dot[1] != ".":
                raise UnsupportedSyntax("prefix directive must end with '.'", dot[2])
            prefixes[name[1][:-1]] = iri[1][1:-1]
            continue
        subject = expect({"pname"}, "subject")
        while True:
            pred = expect({"pname", "a"}, "predicate")
            while True:
                obj = expect({"pname", "string"}, "object")
                if obj[2] not in inferred_lines:
                    triples.append((subject, pred, obj))
                sep = expect({"punct"}, "';', ',' or '.'")
                if sep[1] != ",":
                    break
            if sep[1] == ".":
                break
            if i < len(tokens) and tokens[i][0] == "punct" and tokens[i][1] == ".":
                i += 1
                break
    return prefixes, triples


def import_turtle(text: str, schema: Schema, mode: Mode = Mode.LENIENT,
                  policy: Optional[IriPolicy] = None) -> KnowledgeBase:
    """Rebuild a KB from ``export_turtle`` output.

    Lines annotated ``# inferred:`` are skipped, so the result holds the
    asserted graph only.
    """
    policy = policy or IriPolicy()
    prefixes, triples = _parse_triples(text)
    by_ns = {ns: p for p, ns in prefixes.items()}
    roles = {policy.hdt_namespace: "hdt", policy.crm_namespace: "crm", policy.base_namespace: "ex",
             RDFS_NS: "rdfs", RDF_NS: "rdf"}

    def expand(tok):
        prefix, local = tok[1].split(":", 1)
        if prefix not in prefixes:
            raise UnsupportedSyntax(f"undeclared prefix {prefix!r}", tok[2])
        role = roles.get(prefixes[prefix])
        if role is None:
            raise UnsupportedSyntax(f"namespace {prefixes[prefix]!r} is not part of the export vocabulary", tok[2])
        return role, local

    def vocab_code(tok, lookup):
        role, local = expand(tok)
        if role not in ("hdt", "crm"):
            raise UnsupportedSyntax(f"{tok[1]!r} is not a vocabulary term", tok[2])
        code = local.split("_", 1)[0]
        code = code if role == "hdt" else f"{CRM}:{code}"
        lookup(code)
        return code

    nodes: dict = {}
    order = []
    edges = []
    for subj, pred, obj in triples:
        role, slug = expand(subj)
        if role != "ex":
            raise UnsupportedSyntax(f"subject {subj[1]!r} is not an instance", subj[2])
        if slug not in nodes:
            nodes[slug] = {"classes": [], "label": None, "comment": None, "value": None}
            order.append(slug)
        node = nodes[slug]
        if pred[0] == "a":
            node["classes"].append(vocab_code(obj, schema.cls))
            continue
        prole, plocal = expand(pred)
        if prole in ("rdfs", "rdf"):
            field = {("rdfs", "label"): "label", ("rdfs", "comment"): "comment",
                     ("rdf", "value"): "value"}.get((prole, plocal))
            if field is None or obj[0] != "string":
                raise UnsupportedSyntax(f"unsupported annotation {pred[1]!r}", pred[2])
            node[field] = _unescape(obj[1][1:-1], obj[2])
            continue
        code = vocab_code(pred, schema.prop)
        orole, oslug = expand(obj) if obj[0] == "pname" else (None, None)
        if orole != "ex":
            raise UnsupportedSyntax(f"object of {pred[1]!r} must be an instance", obj[2])
        edges.append((slug, code, oslug, obj[2]))

    kb = KnowledgeBase(schema, mode)
    ids = {}
    for slug in order:
        node = nodes[slug]
        if not node["classes"] or node["label"] is None:
            raise UnsupportedSyntax(f"node ex:{slug} lacks a type or a label")
        name = node["value"] if node["value"] is not None else node["label"]
        for code in node["classes"]:
            ids[slug], _ = kb.assert_instance(name, code)
        if node["comment"] is not None:
            kb.set_description(ids[slug], node["comment"])
    for s, code, o, line in edges:
        if o not in ids:
            raise UnsupportedSyntax(f"ex:{o} is used but never described", line)
        kb.assert_statement(ids[s], code, Direction.FORWARD, ids[o])
    return kb
