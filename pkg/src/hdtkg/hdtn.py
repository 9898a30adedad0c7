"""Reader, loader and writer for the plain-text heritage notation (HDT-N).

A record starts with an unindented subject line; indented lines are
statements about the current subject, and a deeper indent makes the
previous statement's object the subject::

    Pafos Gate (HC16 Tangible Asset)
        HP12 is located in Nicosia, Cyprus (HC13 Heritage Location)
        HP13 has intangible component Tanners and Dyers Commerce (HC17 Intangible Asset)
            HP14 has manifestation event Activity of Tanners and Dyers Workshops (HC8 Heritage Event)

Each node ends with its parenthesized class; double-quoted objects are
literals.  Instance-description files (``.hdti``) hold labelled blocks of
``Instance:``, ``Instance of Class:`` and ``Instance Description:`` lines.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import (
    ERROR,
    INFO,
    Diagnostic,
    EmptyPropertyName,
    HdtError,
    InconsistentIndent,
    IndentJump,
    LoadError,
    MalformedBlock,
    MissingClassAnnotation,
    OrphanStatement,
    ParseError,
    UnbalancedParen,
    UnbalancedQuote,
)
from .kb import KnowledgeBase
from .schema import Schema, builtin_schema, split_token

NAMED = "Named"
QUOTED_LITERAL = "QuotedLiteral"

_QUOTES = {'"': '"', "“": "”"}
_TOKEN_RE = re.compile(r"^((?:[A-Za-z]+:)?[A-Z]{1,3}\s?\d+)\s+")


@dataclass(frozen=True)
class Span:
    line: int
    column: int
    end_column: int


@dataclass
class NodeRef:
    kind: str
    text: str
    class_token: str


@dataclass
class StatementLine:
    depth: int
    property_token: Optional[str]
    property_name: str
    object: NodeRef
    children: list = field(default_factory=list)
    line: int = 0


@dataclass
class Record:
    subject: NodeRef
    statements: list = field(default_factory=list)
    line: int = 0


@dataclass
class ParsedDocument:
    records: list
    source_map: dict

    def statement_lines(self):
        """Every statement line, depth first, with its subject node."""
        def walk(subject, lines):
            for st in lines:
                yield subject, st
                yield from walk(st.object, st.children)
        for rec in self.records:
            yield from walk(rec.subject, rec.statements)


@dataclass
class InstanceBlock:
    instance_name: str
    class_token: str
    description: str
    quoted: bool = False
    line: int = 0


# parsing ---------------------------------------------------------------------

def _check_delimiters(text: str, lineno: int, col: int) -> None:
    open_q = None
    depth = 0
    for i, ch in enumerate(text):
        if open_q is not None:
            if ch == open_q:
                open_q = None
            continue
        if ch in _QUOTES:
            open_q = _QUOTES[ch]
        elif ch == "”":
            raise UnbalancedQuote("closing quote without opening quote", lineno)
        elif ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise UnbalancedParen(f"unmatched ')' at column {col + i + 1}", lineno)
    if open_q is not None:
        raise UnbalancedQuote("unterminated quoted string", lineno)
    if depth:
        raise UnbalancedParen("unclosed '('", lineno)


def _strip_emphasis(text: str) -> str:
    return text.strip().strip("*").strip()


def _split_annotation(text: str, lineno: int):
    """``"Pisa (HC13 Heritage Location)"`` -> ``("Pisa", "HC13 Heritage Location")``."""
    body = text.rstrip()
    if not body.endswith(")"):
        raise MissingClassAnnotation("node has no trailing (class) annotation", lineno)
    depth = 0
    open_q = None
    start = None
    for i in range(len(body) - 1, -1, -1):
        ch = body[i]
        if open_q is not None:
            if ch == open_q:
                open_q = None
            continue
        if ch in ('"', "”"):
            open_q = '"' if ch == '"' else "“"
        elif ch == ")":
            depth += 1
        elif ch == "(":
            depth -= 1
            if depth == 0:
                start = i
                break
    if start is None:
        raise UnbalancedParen("class annotation has no opening '('", lineno)
    cls = _strip_emphasis(body[start + 1:-1])
    if not cls:
        raise MissingClassAnnotation("empty class annotation", lineno)
    return body[:start].rstrip(), cls


def _node(head: str, cls: str, lineno: int) -> NodeRef:
    head = _strip_emphasis(head)
    if not head:
        raise ParseError("node name is empty", lineno)
    if head[0] in _QUOTES:
        close = _QUOTES[head[0]]
        if len(head) < 2 or head[-1] != close:
            raise UnbalancedQuote("quoted literal must span the whole node name", lineno)
        return NodeRef(QUOTED_LITERAL, head[1:-1], cls)
    return NodeRef(NAMED, head, cls)


class _NameMatcher:
    """Splits ``"is located in Pisa"`` into property name and object text."""

    def __init__(self, schema: Schema):
        self.schema = schema
        self.all_names = sorted(schema.property_names(), key=len, reverse=True)

    def _longest(self, names, rest: str):
        low = " ".join(rest.split()).casefold()
        for name in sorted(names, key=len, reverse=True):
            n = name.casefold()
            if low.startswith(n + " ") and len(low) > len(n) + 1:
                return len(n)
        return None

    def split(self, token: Optional[str], rest: str, lineno: int):
        rest = " ".join(rest.split())
        size = None
        if token:
            code, _ = split_token(token)
            if code in self.schema.properties:
                size = self._longest(self.schema.names_of(code), rest)
        if size is None:
            size = self._longest(self.all_names, rest)
        if size is None:
            words = rest.split(" ", 1)
            if len(words) < 2 or not words[0]:
                raise EmptyPropertyName("statement has no property name before its object", lineno)
            return words[0], words[1]
        return rest[:size], rest[size + 1:]


def parse_hdtn(text: str, schema: Optional[Schema] = None) -> ParsedDocument:
    """Parse HDT-N text into records; raises a ``ParseError`` subclass on bad input."""
    matcher = _NameMatcher(schema or builtin_schema())
    records = []
    source_map = {}
    unit = None
    record = None
    stack = []  # stack[d] = (statement line, path) at depth d
    text = text.lstrip("﻿")

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        stripped = line.lstrip(" \t")
        if not stripped:
            record = None
            stack = []
            continue
        if stripped.startswith("#"):
            continue
        indent = line[: len(line) - len(stripped)]
        if indent:
            if unit is None:
                if "\t" in indent and " " in indent:
                    raise InconsistentIndent("indent mixes tabs and spaces", lineno)
                unit = "\t" if "\t" in indent else " " * len(indent)
            if unit == "\t":
                if set(indent) != {"\t"}:
                    raise InconsistentIndent("file indents with tabs; this line uses spaces", lineno)
                level = len(indent)
            else:
                if set(indent) != {" "} or len(indent) % len(unit):
                    raise InconsistentIndent(
                        f"indent of {len(indent)} columns is not a multiple of {len(unit)} spaces", lineno)
                level = len(indent) // len(unit)
        else:
            level = 0
        col = len(indent)
        _check_delimiters(stripped, lineno, col)

        if level == 0:
            head, cls = _split_annotation(stripped, lineno)
            record = Record(_node(head, cls, lineno), [], lineno)
            records.append(record)
            stack = []
            source_map[(len(records) - 1,)] = Span(lineno, col + 1, len(line))
            continue

        if record is None:
            raise OrphanStatement("indented statement has no subject line above it", lineno)
        if level > len(stack) + 1:
            raise IndentJump(f"indent jumps from depth {len(stack)} to {level}", lineno)
        head, cls = _split_annotation(stripped, lineno)
        token = None
        m = _TOKEN_RE.match(head)
        if m:
            token = m.group(1)
            head = head[m.end():]
        name, obj_text = matcher.split(token, head, lineno)
        st = StatementLine(level - 1, token, name, _node(obj_text, cls, lineno), [], lineno)
        del stack[level - 1:]
        if level == 1:
            record.statements.append(st)
            path = (len(records) - 1, len(record.statements) - 1)
        else:
            parent, parent_path = stack[-1]
            parent.children.append(st)
            path = parent_path + (len(parent.children) - 1,)
        stack.append((st, path))
        source_map[path] = Span(lineno, col + 1, len(line))

    return ParsedDocument(records, source_map)


def parse_instance_blocks(text: str):
    """Parse ``Instance:`` / ``Instance of Class:`` / ``Instance Description:`` blocks."""
    labels = (("instance", "Instance:"), ("class", "Instance of Class:"),
              ("description", "Instance Description:"))
    blocks = []
    current = None
    expected = 0

    def finish():
        if current is None:
            return
        if expected != 3:
            raise MalformedBlock(f"block {current['name']!r} lacks its "
                                 f"{labels[expected][1]!r} line", current["line"])
        name = _strip_emphasis(current["name"])
        quoted = bool(name) and name[0] in _QUOTES and name[-1] == _QUOTES[name[0]]
        if quoted:
            name = name[1:-1]
        desc = "\n".join(current["description"]).strip()
        blocks.append(InstanceBlock(name, _strip_emphasis(current["class"]), desc, quoted, current["line"]))

    for lineno, raw in enumerate(text.lstrip("﻿").splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        label = next(((key, lab) for key, lab in reversed(labels) if line.startswith(lab)), None)
        if label is None:
            if current is not None and expected == 3:
                current["description"].append(line)
                continue
            raise MalformedBlock(f"unexpected text {line!r}", lineno)
        key, lab = label
        value = line[len(lab):].strip()
        if key == "instance":
            finish()
            if not value:
                raise MalformedBlock("empty instance name", lineno)
            current = {"name": value, "line": lineno, "description": []}
            expected = 1
            continue
        index = [k for k, _ in labels].index(key)
        if current is None or index != expected:
            raise MalformedBlock(f"{lab!r} out of order", lineno)
        if key == "class":
            if not value:
                raise MalformedBlock("empty class", lineno)
            current["class"] = value
        else:
            current["description"].append(value)
        expected += 1
    finish()
    return blocks


# loading ---------------------------------------------------------------------

def _load_node(kb: KnowledgeBase, node: NodeRef, lineno: int, diags: list) -> int:
    iid, ds = kb.assert_instance(node.text, node.class_token)
    diags.extend(_at(ds, lineno))
    cdef = kb.schema.cls(next(iter(kb.instances[iid].direct_classes))) if kb.instances[iid].is_literal else None
    if node.kind == QUOTED_LITERAL and cdef is None:
        diags.append(Diagnostic("QuotedName", INFO,
                                f"quoted {node.text!r} names a non-literal instance", lineno, node.text))
    return iid


def _at(diags, lineno):
    return [Diagnostic(d.code, d.severity, d.message, lineno, d.ref) for d in diags]


def load_document(kb: KnowledgeBase, doc: ParsedDocument, blocks=None) -> list:
    """Load parsed records (and optional instance blocks) into ``kb``.

    Returns the sorted diagnostics.  Any error-level problem rolls the whole
    load back and raises ``LoadError`` carrying all diagnostics.
    """
    diags = []

    def statement(subject: Optional[int], st: StatementLine):
        obj = None
        try:
            pdef, direction, ds = kb.schema.resolve_property(st.property_token, st.property_name)
            diags.extend(_at(ds, st.line))
            for other in kb.schema.same_named_properties(pdef.code):
                diags.append(Diagnostic(
                    "InfoAlias", INFO,
                    f"{pdef.code} shares the name {st.property_name!r} with {other}; kept as written",
                    st.line, pdef.code))
            obj = _load_node(kb, st.object, st.line, diags)
            if subject is not None:
                _, ds = kb.assert_statement(subject, pdef.code, direction, obj)
                diags.extend(_at(ds, st.line))
        except HdtError as exc:
            diags.append(exc.to_diagnostic(st.line))
        for child in st.children:
            statement(obj, child)

    with kb.atomic():
        for rec in doc.records:
            try:
                subject = _load_node(kb, rec.subject, rec.line, diags)
            except HdtError as exc:
                diags.append(exc.to_diagnostic(rec.line))
                subject = None
            for st in rec.statements:
                statement(subject, st)
        for block in blocks or ():
            try:
                before = len(kb.instances)
                iid, ds = kb.assert_instance(block.instance_name, block.class_token)
                diags.extend(_at(ds, block.line))
                if len(kb.instances) > before:
                    diags.append(Diagnostic(
                        "UnreferencedBlockInstance", INFO,
                        f"block instance {block.instance_name!r} is not used by any statement",
                        block.line, block.instance_name))
                kb.set_description(iid, block.description)
            except HdtError as exc:
                diags.append(exc.to_diagnostic(block.line))
        diags.sort(key=Diagnostic.sort_key)
        if any(d.severity == ERROR for d in diags):
            raise LoadError(diags)
    return diags


def load_files(kb: KnowledgeBase, hdtn_path, blocks_path=None) -> list:
    doc = parse_hdtn(Path(hdtn_path).read_text(encoding="utf-8"), kb.schema)
    blocks = None
    if blocks_path is not None:
        blocks = parse_instance_blocks(Path(blocks_path).read_text(encoding="utf-8"))
    return load_document(kb, doc, blocks)


# writing ---------------------------------------------------------------------

def _format_node(node: NodeRef) -> str:
    text = f'"{node.text}"' if node.kind == QUOTED_LITERAL else node.text
    return f"{text} ({node.class_token})"


def format_hdtn(doc: ParsedDocument, indent: str = "\t") -> str:
    """Render a parsed document back to HDT-N text."""
    out = []

    def emit(st: StatementLine, level: int):
        prop = f"{st.property_token} {st.property_name}" if st.property_token else st.property_name
        out.append(f"{indent * level}{prop} {_format_node(st.object)}")
        for child in st.children:
            emit(child, level + 1)

    for i, rec in enumerate(doc.records):
        if i:
            out.append("")
        out.append(_format_node(rec.subject))
        for st in rec.statements:
            emit(st, 1)
    return "\n".join(out) + ("\n" if out else "")


def _kb_node(kb: KnowledgeBase, iid: int, class_code: Optional[str] = None) -> NodeRef:
    inst = kb.instances[iid]
    code = class_code or sorted(inst.direct_classes)[0]
    kind = QUOTED_LITERAL if inst.is_literal else NAMED
    return NodeRef(kind, inst.name, kb.schema.cls(code).label)


def kb_to_document(kb: KnowledgeBase) -> ParsedDocument:
    """One flat record per instance carrying its asserted statements."""
    outgoing: dict = {}
    for s in kb.asserted():
        outgoing.setdefault(s.subject, []).append(s)
    records = []
    for iid in sorted(kb.instances):
        inst = kb.instances[iid]
        codes = sorted(inst.direct_classes)
        lines = []
        for s in outgoing.get(iid, []):
            pdef = kb.schema.prop(s.property)
            lines.append(StatementLine(0, pdef.code, pdef.forward_name, _kb_node(kb, s.object)))
        records.append(Record(_kb_node(kb, iid, codes[0]), lines))
        for extra in codes[1:]:
            records.append(Record(_kb_node(kb, iid, extra), []))
    return ParsedDocument(records, {})


def dump_hdtn(kb: KnowledgeBase) -> str:
    return format_hdtn(kb_to_document(kb))


def dump_instance_blocks(kb: KnowledgeBase) -> str:
    out = []
    for iid in sorted(kb.instances):
        inst = kb.instances[iid]
        if inst.description is None:
            continue
        name = f'"{inst.name}"' if inst.is_literal else inst.name
        cls = kb.schema.cls(sorted(inst.direct_classes)[0]).label
        out += [f"Instance: {name}", f"Instance of Class: {cls}", f"Instance Description: {inst.description}", ""]
    return "\n".join(out)
