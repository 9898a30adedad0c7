"""Exceptions and the diagnostic record shared by every module."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

ERROR = "error"
WARNING = "warning"
INFO = "info"

_SEVERITY_RANK = {ERROR: 0, WARNING: 1, INFO: 2}


@dataclass(frozen=True)
class Diagnostic:
    code: str
    severity: str
    message: str
    line: Optional[int] = None
    ref: Optional[str] = None

    def sort_key(self):
        return (
            self.line if self.line is not None else -1,
            _SEVERITY_RANK[self.severity],
            self.code,
            self.ref or "",
            self.message,
        )

    def format(self) -> str:
        where = f"line {self.line}: " if self.line is not None else ""
        return f"{self.severity}: {where}{self.code}: {self.message}"


def count_by_severity(diagnostics) -> dict:
    counts = {ERROR: 0, WARNING: 0, INFO: 0}
    for d in diagnostics:
        counts[d.severity] += 1
    return counts


def count_by_code(diagnostics) -> dict:
    counts: dict = {}
    for d in diagnostics:
        counts[d.code] = counts.get(d.code, 0) + 1
    return dict(sorted(counts.items()))


class HdtError(Exception):
    """Base class; ``code`` names the failure kind for diagnostics."""

    code = "Error"

    def __init__(self, message: str, line: Optional[int] = None, ref: Optional[str] = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.message = message
        self.line = line
        self.ref = ref

    def to_diagnostic(self, line: Optional[int] = None) -> Diagnostic:
        return Diagnostic(self.code, ERROR, self.message,
                          line if line is not None else self.line, self.ref)


class UnknownClass(HdtError):
    code = "UnknownClass"


class UnknownProperty(HdtError):
    code = "UnknownProperty"


class AmbiguousName(HdtError):
    code = "AmbiguousName"


class SchemaInvalid(HdtError):
    code = "SchemaInvalid"


class AbstractClassInstantiation(HdtError):
    code = "AbstractClassInstantiation"


class UnknownInstance(HdtError):
    code = "UnknownInstance"


class UnknownStatement(HdtError):
    code = "UnknownStatement"


class DomainViolation(HdtError):
    code = "DomainViolation"


class RangeViolation(HdtError):
    code = "RangeViolation"


class ParseError(HdtError):
    code = "ParseError"


class IndentJump(ParseError):
    code = "IndentJump"


class InconsistentIndent(ParseError):
    code = "InconsistentIndent"


class MissingClassAnnotation(ParseError):
    code = "MissingClassAnnotation"


class UnbalancedParen(ParseError):
    code = "UnbalancedParen"


class UnbalancedQuote(ParseError):
    code = "UnbalancedQuote"


class EmptyPropertyName(ParseError):
    code = "EmptyPropertyName"


class OrphanStatement(ParseError):
    code = "OrphanStatement"


class MalformedBlock(ParseError):
    code = "MalformedBlock"


class LoadError(HdtError):
    """Raised by the loader; carries every accumulated diagnostic."""

    code = "LoadError"

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        errors = [d for d in self.diagnostics if d.severity == ERROR]
        first = errors[0].format() if errors else "load failed"
        super().__init__(f"{len(errors)} error(s); first: {first}")


class UnsupportedSyntax(HdtError):
    code = "UnsupportedSyntax"


class EmptySlug(HdtError):
    code = "EmptySlug"


class UnknownProcedure(HdtError):
    code = "UnknownProcedure"


class UnknownRegion(HdtError):
    code = "UnknownRegion"


class GeoDataError(HdtError):
    code = "GeoDataError"
