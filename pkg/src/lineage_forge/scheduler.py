"""Orders extraction so that view dependencies resolve automatically.

Queries run in source order. When one scans a registered relation whose
schema is still unknown, it is pushed onto a deferral stack and the next
query runs instead; whenever a query completes, the most recently deferred
query whose dependency is now satisfied resumes. No dependency graph is
built up front: the stack discipline alone discovers a working order.

If everything left is deferred and nothing can resume, the wait-on chain
from the top of the stack necessarily loops; the cycle's members are
reported, marked unresolvable (their scans fall back to incomplete
base-table treatment) and re-run, so every registered query still yields a
lineage and independent queries are unaffected.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .catalog import Catalog
from .diagnostics import SEVERITY_ERROR, Diagnostic
from .engine import Deferred, Engine, QueryLineage
from .registry import QueryDictionary


@dataclass
class ScheduleResult:
    """Lineages in resolution order plus everything observable about how
    the run unfolded."""

    lineages: dict[str, QueryLineage]
    order: list[str] = field(default_factory=list)
    deferrals: list[tuple[str, str]] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)
    traces: dict[str, list[tuple]] = field(default_factory=dict)


def run_all(registry: QueryDictionary, catalog: Catalog) -> ScheduleResult:
    engine = Engine(registry, catalog)
    result = ScheduleResult(lineages={})

    pending = deque(registry.ids())
    stack: list[tuple[str, str]] = []  # (query id, relation it waits on)

    def dependency_ready(missing: str) -> bool:
        return (
            missing in result.lineages
            or missing in engine.unresolvable
            or catalog.is_complete(missing)
        )

    while pending or stack:
        query_id = _pop_ready(stack, dependency_ready)
        if query_id is None:
            if pending:
                query_id = pending.popleft()
            else:
                members = _trapped_cycle(stack)
                result.diagnostics.append(
                    Diagnostic(
                        SEVERITY_ERROR,
                        "cyclic-dependency",
                        "cyclic view dependency: " + " -> ".join(members + members[:1]),
                        members[0],
                    )
                )
                engine.unresolvable.update(members)
                stack = [entry for entry in stack if entry[0] not in members]
                pending.extendleft(reversed(members))
                continue

        outcome = engine.extract(query_id, registry.get(query_id).body)
        if isinstance(outcome, Deferred):
            result.deferrals.append((query_id, outcome.missing))
            stack.append((query_id, outcome.missing))
            continue
        result.lineages[query_id] = outcome
        result.order.append(query_id)
        catalog.record_view(query_id, _schema_of(outcome))

    result.diagnostics.extend(engine.diagnostics)
    result.traces = engine.traces
    return result


def _pop_ready(stack: list[tuple[str, str]], ready) -> str | None:
    """Remove and return the most recently deferred query whose dependency
    is satisfied."""
    for index in range(len(stack) - 1, -1, -1):
        if ready(stack[index][1]):
            return stack.pop(index)[0]
    return None


def _trapped_cycle(stack: list[tuple[str, str]]) -> list[str]:
    """Members of the dependency cycle that is blocking the stack.

    Reached only when nothing is pending and no stack entry can resume, so
    every entry waits on another entry; following the wait-on chain from the
    top must revisit a query.
    """
    waits_on = dict(stack)
    seen: list[str] = []
    current = stack[-1][0]
    while current not in seen:
        seen.append(current)
        current = waits_on[current]
    return seen[seen.index(current):]


def _schema_of(lineage: QueryLineage) -> list[str]:
    """Output column names with duplicates dropped, first occurrence wins."""
    names: list[str] = []
    for column in lineage.outputs:
        if column.name not in names:
            names.append(column.name)
    return names
