"""End-to-end analysis: scripts in, merged lineage graph out."""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

from .catalog import Catalog
from .diagnostics import SEVERITY_ERROR, SEVERITY_INFO, SEVERITY_WARNING, Diagnostic
from .frontend.errors import ParseError, UnsupportedStatement
from .frontend.nodes import STMT_BARE_SELECT, STMT_CREATE_VIEW
from .frontend.parser import parse_statement
from .frontend.splitter import split_script
from .graph import LineageGraph, merge
from .registry import (
    ORIGIN_FILE,
    ORIGIN_GENERATED,
    ORIGIN_TABLE_AS,
    ORIGIN_VIEW,
    DuplicateIdentifier,
    NameAllocator,
    QueryDictionary,
)
from .scheduler import ScheduleResult, run_all

# Diagnostics that --strict turns into errors.
_STRICT_CODES = {"parse-error", "unsupported-statement"}


@dataclass
class PipelineResult:
    graph: LineageGraph
    registry: QueryDictionary
    catalog: Catalog
    schedule: ScheduleResult
    diagnostics: list[Diagnostic]


def analyze_script(
    text: str,
    source_name: str | None = None,
    *,
    schema: dict[str, list[str]] | None = None,
    strict: bool = False,
    random_ids: bool = False,
    rng: random.Random | None = None,
) -> PipelineResult:
    return analyze_sources(
        [(source_name, text)],
        schema=schema,
        strict=strict,
        random_ids=random_ids,
        rng=rng,
    )


def analyze_files(
    paths: list[str],
    *,
    schema: dict[str, list[str]] | None = None,
    strict: bool = False,
    random_ids: bool = False,
    rng: random.Random | None = None,
) -> PipelineResult:
    """Read and analyze script files. IO errors propagate to the caller."""
    sources = [(path, Path(path).read_text(encoding="utf-8")) for path in paths]
    return analyze_sources(
        sources, schema=schema, strict=strict, random_ids=random_ids, rng=rng
    )


def analyze_sources(
    sources: list[tuple[str | None, str]],
    *,
    schema: dict[str, list[str]] | None = None,
    strict: bool = False,
    random_ids: bool = False,
    rng: random.Random | None = None,
) -> PipelineResult:
    diagnostics: list[Diagnostic] = []
    registry = QueryDictionary()
    allocator = NameAllocator(random_ids, rng)

    for source_name, text in sources:
        _register_source(source_name, text, registry, allocator, diagnostics)

    catalog = Catalog()
    if schema:
        for relation, columns in schema.items():
            catalog.declare(relation, columns)

    schedule = run_all(registry, catalog)
    diagnostics.extend(schedule.diagnostics)
    if strict:
        diagnostics = [_elevate(diag) for diag in diagnostics]

    graph = merge(schedule.lineages, catalog, registry, diagnostics)
    return PipelineResult(graph, registry, catalog, schedule, diagnostics)


def _register_source(
    source_name: str | None,
    text: str,
    registry: QueryDictionary,
    allocator: NameAllocator,
    diagnostics: list[Diagnostic],
) -> None:
    label = source_name if source_name is not None else "<script>"
    stem_used = False
    try:
        raw_statements = split_script(text)
    except ParseError as exc:
        diagnostics.append(
            Diagnostic(
                SEVERITY_WARNING,
                "parse-error",
                f"{label}: {exc.message} at offset {exc.position}",
            )
        )
        return

    for raw in raw_statements:
        try:
            statement = parse_statement(raw.text)
        except UnsupportedStatement as exc:
            diagnostics.append(
                Diagnostic(
                    SEVERITY_WARNING,
                    "unsupported-statement",
                    f"{label}: {exc.message}",
                )
            )
            continue
        except ParseError as exc:
            diagnostics.append(
                Diagnostic(
                    SEVERITY_WARNING,
                    "parse-error",
                    f"{label}: {exc.message} at offset {raw.offset + exc.position}",
                )
            )
            continue

        if statement.kind == STMT_BARE_SELECT:
            taken_stem = None
            if source_name is not None and not stem_used:
                stem = Path(source_name).stem.lower()
                stem_used = True
                if stem not in registry:
                    registry.add(stem, statement.body, ORIGIN_FILE)
                    continue
                taken_stem = stem
            # Assigned names are our own choice, so collisions (a relation
            # named like the file, or like query_<k>) fall through to the
            # next free generated id instead of erroring.
            query_id = allocator.next_id()
            while query_id in registry:
                query_id = allocator.next_id()
            if taken_stem is not None:
                diagnostics.append(
                    Diagnostic(
                        SEVERITY_WARNING,
                        "duplicate-identifier",
                        f"{label}: id {taken_stem!r} already taken; "
                        f"statement registered as {query_id!r}",
                        query_id,
                    )
                )
            registry.add(query_id, statement.body, ORIGIN_GENERATED)
            continue

        origin = ORIGIN_VIEW if statement.kind == STMT_CREATE_VIEW else ORIGIN_TABLE_AS
        if statement.replace:
            if registry.replace(statement.name, statement.body, origin):
                diagnostics.append(
                    Diagnostic(
                        SEVERITY_INFO,
                        "replaced-view",
                        f"{label}: {statement.name} was redefined",
                        statement.name,
                    )
                )
            continue
        try:
            registry.add(statement.name, statement.body, origin)
        except DuplicateIdentifier:
            diagnostics.append(
                Diagnostic(
                    SEVERITY_ERROR,
                    "duplicate-identifier",
                    f"{label}: {statement.name} is already defined; "
                    "statement skipped (use CREATE OR REPLACE to redefine)",
                    statement.name,
                )
            )


def _elevate(diag: Diagnostic) -> Diagnostic:
    if diag.code in _STRICT_CODES and diag.severity == SEVERITY_WARNING:
        return Diagnostic(SEVERITY_ERROR, diag.code, diag.message, diag.query)
    return diag
