"""Column catalog built up while scripts are analyzed.

No database connection is ever made: everything the catalog knows comes from
three sources with increasing authority.

- observed: base-table columns seen in qualified references. Always
  incomplete; a star over such a table cannot be trusted to expand.
- declared: columns supplied by an external schema file. Complete.
- resolved: the recorded output schema of a view that finished extraction.
  Complete.

Declarations replace observations; resolved view schemas replace both.
Observations never downgrade a complete entry.
"""

from __future__ import annotations

from dataclasses import dataclass

PROVENANCE_OBSERVED = "observed"
PROVENANCE_DECLARED = "declared"
PROVENANCE_RESOLVED = "resolved"


@dataclass(frozen=True, order=True)
class ColumnRef:
    """A fully qualified column: relation name plus column name."""

    relation: str
    column: str

    def __str__(self) -> str:
        return f"{self.relation}.{self.column}"

    @staticmethod
    def parse(text: str) -> "ColumnRef":
        relation, _, column = text.rpartition(".")
        if not relation or not column:
            raise ValueError(f"not a qualified column: {text!r}")
        return ColumnRef(relation, column)


@dataclass(frozen=True)
class UnresolvedStar:
    """Placeholder for a star over a relation with unknown columns."""

    relation: str

    @property
    def placeholder(self) -> str:
        return f"{self.relation}.*"


class UnknownQualifier(Exception):
    """A star qualifier that names no relation in scope."""


class _Entry:
    __slots__ = ("columns", "provenance")

    def __init__(self, provenance: str):
        self.columns: list[str] = []
        self.provenance = provenance

    @property
    def complete(self) -> bool:
        return self.provenance != PROVENANCE_OBSERVED


class Catalog:
    """Mutable store of per-relation column knowledge."""

    def __init__(self):
        self._entries: dict[str, _Entry] = {}

    def observe(self, relation: str, column: str) -> None:
        """Record that relation has a column, in first-seen order.

        A no-op when the relation's schema is already complete: qualified
        references cannot add columns to a declared table or resolved view.
        """
        entry = self._entries.get(relation)
        if entry is None:
            entry = _Entry(PROVENANCE_OBSERVED)
            self._entries[relation] = entry
        if entry.complete:
            return
        if column not in entry.columns:
            entry.columns.append(column)

    def declare(self, relation: str, columns: list[str]) -> None:
        """Install an externally supplied complete schema for relation."""
        entry = _Entry(PROVENANCE_DECLARED)
        entry.columns = list(columns)
        self._entries[relation] = entry

    def record_view(self, relation: str, columns: list[str]) -> None:
        """Install the output schema of a resolved view or registered query."""
        entry = _Entry(PROVENANCE_RESOLVED)
        entry.columns = list(columns)
        self._entries[relation] = entry

    def columns_of(self, relation: str) -> tuple[list[str], bool] | None:
        """(columns, complete) for relation, or None when nothing is known."""
        entry = self._entries.get(relation)
        if entry is None:
            return None
        return list(entry.columns), entry.complete

    def is_complete(self, relation: str) -> bool:
        entry = self._entries.get(relation)
        return entry is not None and entry.complete

    def provenance_of(self, relation: str) -> str | None:
        entry = self._entries.get(relation)
        return None if entry is None else entry.provenance

    def relations(self) -> list[str]:
        return list(self._entries)

    def expand_star(self, qualifier: str | None, scope) -> list:
        """Expand a star over catalog-backed relations.

        scope is an ordered list of (binding_name, relation) pairs. With a
        qualifier, only the matching binding expands; without one, every
        binding expands in order. Relations with complete schemas yield their
        ColumnRefs; anything else yields a single UnresolvedStar marker.
        """
        if qualifier is not None:
            for binding_name, relation in scope:
                if binding_name == qualifier:
                    return self._expand_one(relation)
            raise UnknownQualifier(qualifier)
        expanded: list = []
        for _, relation in scope:
            expanded.extend(self._expand_one(relation))
        return expanded

    def _expand_one(self, relation: str) -> list:
        known = self.columns_of(relation)
        if known is None or not known[1]:
            return [UnresolvedStar(relation)]
        return [ColumnRef(relation, column) for column in known[0]]


def parse_schema_text(text: str) -> dict[str, list[str]]:
    """Parse schema declarations, one `table(col, col, ...)` per line.

    Blank lines and lines starting with # are skipped. Identifiers follow
    the usual normalization: unquoted fold to lowercase, double-quoted keep
    their exact text.
    """
    declarations: dict[str, list[str]] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        open_paren = line.find("(")
        if open_paren <= 0 or not line.endswith(")"):
            raise ValueError(f"line {lineno}: expected table(col, ...), got {line!r}")
        table = _normalize_schema_ident(line[:open_paren].strip(), lineno)
        body = line[open_paren + 1 : -1]
        columns = [
            _normalize_schema_ident(part.strip(), lineno)
            for part in body.split(",")
            if part.strip()
        ]
        if not columns:
            raise ValueError(f"line {lineno}: table {table!r} declares no columns")
        declarations[table] = columns
    return declarations


def load_schema_file(path: str) -> dict[str, list[str]]:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_schema_text(handle.read())


def _normalize_schema_ident(text: str, lineno: int) -> str:
    if not text:
        raise ValueError(f"line {lineno}: empty identifier")
    if text.startswith('"') and text.endswith('"') and len(text) >= 2:
        return text[1:-1]
    # Dotted names normalize per part.
    return ".".join(part.lower() for part in text.split("."))
