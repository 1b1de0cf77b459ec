"""Shared diagnostic record emitted by every pipeline stage."""

from __future__ import annotations

from dataclasses import dataclass

SEVERITY_INFO = "info"
SEVERITY_WARNING = "warning"
SEVERITY_ERROR = "error"

_SEVERITY_RANK = {SEVERITY_INFO: 0, SEVERITY_WARNING: 1, SEVERITY_ERROR: 2}


@dataclass(frozen=True)
class Diagnostic:
    """A non-fatal problem found while processing a script.

    Diagnostics are collected rather than raised so that one bad statement
    cannot take down the rest of a run; the CLI maps the worst severity to
    its exit code.
    """

    severity: str
    code: str
    message: str
    query: str | None = None

    def to_json(self) -> dict:
        doc = {"severity": self.severity, "code": self.code, "message": self.message}
        doc["query"] = self.query
        return doc

    @staticmethod
    def from_json(doc: dict) -> "Diagnostic":
        return Diagnostic(
            severity=doc["severity"],
            code=doc["code"],
            message=doc["message"],
            query=doc.get("query"),
        )


def worst_severity(diagnostics) -> str | None:
    """Highest severity present, or None for an empty list."""
    worst = None
    for diag in diagnostics:
        if worst is None or _SEVERITY_RANK[diag.severity] > _SEVERITY_RANK[worst]:
            worst = diag.severity
    return worst
