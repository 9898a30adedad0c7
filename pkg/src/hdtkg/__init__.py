"""Knowledge-graph engine for heritage digital twins."""

from .errors import Diagnostic, HdtError, LoadError
from .hdtn import dump_hdtn, load_document, load_files, parse_hdtn, parse_instance_blocks
from .inference import entail, explain
from .kb import KnowledgeBase, Mode, isomorphic, new_kb
from .reactor import (
    EventModelEntry,
    FloodAlert,
    GeoLocation,
    Reactor,
    assess_flood,
    plan_actions,
    record_event,
)
from .schema import Direction, builtin_schema, check_schema, dump_schema
from .turtle import IriPolicy, export_turtle, import_turtle

__all__ = [
    "Diagnostic", "HdtError", "LoadError",
    "dump_hdtn", "load_document", "load_files", "parse_hdtn", "parse_instance_blocks",
    "entail", "explain",
    "KnowledgeBase", "Mode", "isomorphic", "new_kb",
    "EventModelEntry", "FloodAlert", "GeoLocation", "Reactor", "assess_flood", "plan_actions", "record_event",
    "Direction", "builtin_schema", "check_schema", "dump_schema",
    "IriPolicy", "export_turtle", "import_turtle",
]
