"""Command-line entry point: ``hdtkg <subcommand> <file> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from .errors import (
    ERROR,
    GeoDataError,
    HdtError,
    LoadError,
    ParseError,
    UnknownProperty,
    count_by_code,
    count_by_severity,
)
from .hdtn import dump_hdtn, dump_instance_blocks, load_files
from .inference import entail, explain
from .kb import KnowledgeBase, Mode
from .reactor import (
    FloodAlert,
    Reactor,
    load_geo_index,
    plan_to_json,
    record_event,
)
from .schema import Direction, builtin_schema, split_token
from .turtle import export_turtle

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so ``run`` owns exit codes."""

    def error(self, message):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hdtkg", description="Heritage digital twin knowledge graph tools.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("file", help="HDT-N document")
        sp.add_argument("--blocks", help="instance block file with descriptions")
        sp.add_argument("--mode", choices=["strict", "lenient"], default="lenient")
        return sp

    add("validate", "load and report diagnostics")

    q = add("query", "list matching statements as tab-separated rows")
    q.add_argument("--subject")
    q.add_argument("--property")
    q.add_argument("--object")
    q.add_argument("--inverse", action="store_true", help="read the property in its inverse direction")
    q.add_argument("--infer", action="store_true", help="include entailed statements")

    i = add("infer", "compute the entailment closure")
    i.add_argument("--explain", type=int, metavar="ID", help="print the derivation of one statement")

    e = add("export-turtle", "write the graph as Turtle")
    e.add_argument("--include-inferred", action="store_true")
    e.add_argument("--out")

    s = add("stats", "instance, statement and diagnostic counts as JSON")
    s.add_argument("--figure", help="also draw per-property statement counts to this image file")

    f = add("simulate-flood", "assess a flood alert and plan protective actions")
    f.add_argument("--geo", required=True, help="geo sidecar JSON")
    f.add_argument("--alert", required=True, help="alert JSON")
    f.add_argument("--actuators", help="asset-to-actuator JSON")
    f.add_argument("--record", action="store_true", help="write the event into the KB")
    f.add_argument("--out", help="HDT-N output path for --record")
    f.add_argument("--figure", help="also draw the risk report to this image file")
    return p


def _load(args, err):
    kb = KnowledgeBase(builtin_schema(), Mode(args.mode))
    diags = load_files(kb, args.file, args.blocks)
    for d in diags:
        print(f"{args.file}: {d.format()}", file=err)
    return kb, diags


def _resolve_instance(kb: KnowledgeBase, name: Optional[str]):
    if name is None:
        return None
    iid = kb.find(name)
    if iid is None:
        raise _UsageError(f"no instance named {name!r}")
    return iid


def _resolve_property_arg(kb: KnowledgeBase, text: Optional[str]):
    if text is None:
        return None
    code, rest = split_token(text)
    if code is not None and code in kb.schema.properties:
        return code
    pdef, _, _ = kb.schema.resolve_property(code if code else None, rest if code else text)
    return pdef.code


def _cmd_validate(args, out, err):
    kb, diags = _load(args, err)
    problems = kb.validate()
    for d in problems:
        print(f"{args.file}: {d.format()}", file=err)
    counts = count_by_severity(diags)
    out.write(f"instances\t{len(kb.instances)}\n")
    out.write(f"statements\t{len(kb.statements)}\n")
    for sev in (ERROR, "warning", "info"):
        out.write(f"{sev}s\t{counts[sev]}\n")
    out.write(f"violations\t{len(problems)}\n")
    if kb.mode is Mode.STRICT and problems:
        return EXIT_VALIDATION
    return EXIT_OK


def _cmd_query(args, out, err):
    kb, _ = _load(args, err)
    if args.infer:
        kb = entail(kb)
    subject = _resolve_instance(kb, args.subject)
    obj = _resolve_instance(kb, args.object)
    prop = _resolve_property_arg(kb, args.property)
    direction = Direction.INVERSE if args.inverse else Direction.FORWARD
    for s in kb.query(subject, prop, obj, direction, with_inference=args.infer):
        pdef = kb.schema.prop(s.property)
        out.write("\t".join([str(s.id), kb.label(s.subject), f"{pdef.code} {pdef.forward_name}",
                             kb.label(s.object), s.provenance]) + "\n")
    return EXIT_OK


def _cmd_infer(args, out, err):
    kb, _ = _load(args, err)
    closed = entail(kb)
    if args.explain is not None:
        out.write(explain(closed, args.explain).render(closed) + "\n")
        return EXIT_OK
    for sid in sorted(closed.statements):
        s = closed.statements[sid]
        if s.inferred:
            out.write("\t".join([str(s.id), closed.label(s.subject), s.property,
                                 closed.label(s.object), s.provenance]) + "\n")
    return EXIT_OK


def _cmd_export(args, out, err):
    kb, _ = _load(args, err)
    if args.include_inferred:
        kb = entail(kb)
    text = export_turtle(kb, include_inferred=args.include_inferred)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


def kb_stats(kb: KnowledgeBase, diags) -> dict:
    closed = entail(kb)
    props: dict = {}
    for s in closed.statements.values():
        entry = props.setdefault(s.property, {"asserted": 0, "inferred": 0})
        entry["inferred" if s.inferred else "asserted"] += 1
    classes: dict = {}
    for inst in kb.instances.values():
        for c in inst.direct_classes:
            classes[c] = classes.get(c, 0) + 1
    return {
        "instances": len(kb.instances),
        "statements": {"asserted": len(kb.asserted()),
                       "inferred": len(closed.statements) - len(kb.asserted())},
        "diagnostics": {"by_severity": count_by_severity(diags), "by_code": count_by_code(diags)},
        "violations": count_by_code(kb.validate()),
        "classes": classes,
        "properties": props,
    }


def _cmd_stats(args, out, err):
    kb, diags = _load(args, err)
    stats = kb_stats(kb, diags)
    out.write(json.dumps(stats, indent=2, sort_keys=True) + "\n")
    if args.figure:
        from .plotting import stats_figure
        stats_figure(stats, args.figure)
    return EXIT_OK


def _cmd_flood(args, out, err):
    if args.record and not args.out:
        raise _UsageError("--record needs --out")
    kb, _ = _load(args, err)
    geo = load_geo_index(args.geo)
    alert = FloodAlert.load(args.alert)
    actuators = json.loads(Path(args.actuators).read_text(encoding="utf-8")) if args.actuators else None
    report, plan = Reactor().handle_flood(entail(kb), geo, alert, actuators)
    for row in report.assessed:
        if row.reason.value == "NoElevationData":
            print(f"{args.file}: warning: NoElevationData: {row.asset} at {row.location}", file=err)
    out.write(plan_to_json(plan, report))
    if args.figure:
        from .plotting import flood_figure
        flood_figure(report, args.figure)
    if args.record:
        record_event(kb, alert, report)
        Path(args.out).write_text(dump_hdtn(kb), encoding="utf-8")
        Path(args.out).with_suffix(".hdti").write_text(dump_instance_blocks(kb), encoding="utf-8")
    return EXIT_OK


COMMANDS = {
    "validate": _cmd_validate,
    "query": _cmd_query,
    "infer": _cmd_infer,
    "export-turtle": _cmd_export,
    "stats": _cmd_stats,
    "simulate-flood": _cmd_flood,
}


def run(argv=None, out=None, err=None) -> int:
    """Run one subcommand; returns the exit status (0 ok, 1 validation, 2 usage/parse, 3 internal)."""
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out, err)
    except _UsageError as exc:
        print(f"hdtkg: usage error: {exc}", file=err)
        return EXIT_USAGE
    except LoadError as exc:
        for d in exc.diagnostics:
            if d.severity == ERROR:
                print(d.format(), file=err)
        parse_only = all(d.code not in ("DomainViolation", "RangeViolation")
                         for d in exc.diagnostics if d.severity == ERROR)
        return EXIT_USAGE if parse_only else EXIT_VALIDATION
    except (ParseError, UnknownProperty, GeoDataError, OSError, ValueError, KeyError) as exc:
        print(f"hdtkg: error: {exc}", file=err)
        return EXIT_USAGE
    except HdtError as exc:
        print(f"hdtkg: {exc.code}: {exc}", file=err)
        return EXIT_VALIDATION
    except Exception as exc:  # pragma: no cover - last resort
        print(f"hdtkg: internal error: {exc!r}", file=err)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run(sys.argv[1:]))
