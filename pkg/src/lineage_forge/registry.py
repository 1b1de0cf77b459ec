"""Query dictionary: every named query a script defines, in source order.

CREATE VIEW and CREATE TABLE AS register under their written name; bare
SELECT statements are registered under an assigned name so their lineage can
be addressed and scanned like any other relation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .frontend.nodes import QueryNode

ORIGIN_VIEW = "view"
ORIGIN_TABLE_AS = "table_as"
ORIGIN_FILE = "file"
ORIGIN_GENERATED = "generated"

# Origins whose graph nodes are views (persisted relations) rather than
# ad-hoc queries.
_VIEW_LIKE = {ORIGIN_VIEW, ORIGIN_TABLE_AS}


class DuplicateIdentifier(Exception):
    """Two registrations under the same name without OR REPLACE."""

    def __init__(self, query_id: str):
        super().__init__(f"query id already registered: {query_id}")
        self.query_id = query_id


@dataclass(frozen=True)
class RegisteredQuery:
    query_id: str
    body: QueryNode
    origin: str


class QueryDictionary:
    """Ordered mapping of query id to its defining body."""

    def __init__(self):
        self._entries: dict[str, RegisteredQuery] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, query_id: str) -> bool:
        return query_id in self._entries

    def __iter__(self):
        return iter(self._entries.values())

    def ids(self) -> list[str]:
        return list(self._entries)

    def get(self, query_id: str) -> RegisteredQuery | None:
        return self._entries.get(query_id)

    def add(self, query_id: str, body: QueryNode, origin: str) -> None:
        if query_id in self._entries:
            raise DuplicateIdentifier(query_id)
        self._entries[query_id] = RegisteredQuery(query_id, body, origin)

    def replace(self, query_id: str, body: QueryNode, origin: str) -> bool:
        """Register, overwriting any earlier entry. True when it replaced."""
        existed = query_id in self._entries
        self._entries[query_id] = RegisteredQuery(query_id, body, origin)
        return existed

    def node_kind(self, query_id: str) -> str:
        entry = self._entries[query_id]
        return "view" if entry.origin in _VIEW_LIKE else "query"

    def resolve_name(self, name: str) -> str | None:
        """Canonical registered id for a scanned relation name.

        Exact match wins; an unqualified name also matches a single
        registration whose last dotted component equals it (so a view
        created as reporting.daily can be scanned as daily). Ambiguous
        suffixes resolve to nothing.
        """
        if name in self._entries:
            return name
        if "." in name:
            return None
        matches = [
            query_id
            for query_id in self._entries
            if "." in query_id and query_id.rsplit(".", 1)[-1] == name
        ]
        if len(matches) == 1:
            return matches[0]
        return None


class NameAllocator:
    """Assigns ids to bare SELECT statements.

    Deterministic mode numbers them query_0, query_1, ... in discovery
    order across the whole run; random mode draws 8 hex characters.
    """

    def __init__(self, random_ids: bool = False, rng: random.Random | None = None):
        self._random_ids = random_ids
        self._rng = rng if rng is not None else random.Random()
        self._counter = 0

    def next_id(self) -> str:
        if self._random_ids:
            return "query_" + "".join(self._rng.choice("0123456789abcdef") for _ in range(8))
        query_id = f"query_{self._counter}"
        self._counter += 1
        return query_id
