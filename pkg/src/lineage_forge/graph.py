"""Merged lineage graph over every query in a run.

Nodes are relations (base tables, views, ad-hoc queries); edges connect a
source column to a destination column with one of three kinds:

- contributes: the source feeds the destination's values
- references: the source influences which rows appear, not the values
- both: contributes and references at once

Per query, an output column's contributors produce contributes edges (or
both, when the contributor is also in the query's referenced set), and every
referenced column gains a references edge to every output column it does not
already contribute to. That fan-out keeps impact analysis conservative: any
column that can change a query's result reaches all of its outputs.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from .catalog import Catalog, ColumnRef
from .diagnostics import Diagnostic
from .engine import QueryLineage

NODE_BASE = "base"
NODE_VIEW = "view"
NODE_QUERY = "query"

EDGE_CONTRIBUTES = "contributes"
EDGE_REFERENCES = "references"
EDGE_BOTH = "both"

JSON_VERSION = 1


class UnknownColumn(Exception):
    def __init__(self, ref: str):
        super().__init__(f"unknown column: {ref}")
        self.ref = ref


class UnknownRelation(Exception):
    def __init__(self, relation: str):
        super().__init__(f"unknown relation: {relation}")
        self.relation = relation


@dataclass
class GraphNode:
    kind: str
    columns: list[str] = field(default_factory=list)


@dataclass
class LineageGraph:
    nodes: dict[str, GraphNode] = field(default_factory=dict)
    edges: dict[tuple[ColumnRef, ColumnRef], str] = field(default_factory=dict)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    # -- construction -------------------------------------------------

    def ensure_node(self, relation: str, kind: str) -> GraphNode:
        node = self.nodes.get(relation)
        if node is None:
            node = GraphNode(kind)
            self.nodes[relation] = node
        return node

    def ensure_column(self, ref: ColumnRef, kind: str = NODE_BASE) -> None:
        node = self.ensure_node(ref.relation, kind)
        if ref.column not in node.columns:
            node.columns.append(ref.column)

    def add_edge(self, src: ColumnRef, dst: ColumnRef, kind: str) -> None:
        key = (src, dst)
        existing = self.edges.get(key)
        self.edges[key] = kind if existing is None else _merge_kinds(existing, kind)

    # -- queries --------------------------------------------------------

    def has_column(self, ref: ColumnRef) -> bool:
        node = self.nodes.get(ref.relation)
        return node is not None and ref.column in node.columns

    def all_columns(self) -> list[ColumnRef]:
        return [
            ColumnRef(relation, column)
            for relation, node in self.nodes.items()
            for column in node.columns
        ]

    def downstream_closure(self, ref: ColumnRef | str) -> set[ColumnRef]:
        """Every column reachable from ref following edges forward.

        All edge kinds traverse: a references edge still means the source
        can change what the destination holds. ref itself is excluded
        unless a cycle leads back to it.
        """
        return self._closure(ref, forward=True)

    def upstream_closure(self, ref: ColumnRef | str) -> set[ColumnRef]:
        """Every column ref depends on, following edges backward."""
        return self._closure(ref, forward=False)

    def _closure(self, ref: ColumnRef | str, forward: bool) -> set[ColumnRef]:
        seed = ColumnRef.parse(ref) if isinstance(ref, str) else ref
        if not self.has_column(seed):
            raise UnknownColumn(str(seed))
        adjacency: dict[ColumnRef, list[ColumnRef]] = {}
        for (src, dst), _ in self.edges.items():
            a, b = (src, dst) if forward else (dst, src)
            adjacency.setdefault(a, []).append(b)
        visited: set[ColumnRef] = set()
        queue = deque(adjacency.get(seed, ()))
        while queue:
            current = queue.popleft()
            if current in visited:
                continue
            visited.add(current)
            queue.extend(adjacency.get(current, ()))
        return visited

    def neighbors(self, relation: str) -> tuple[list[str], list[str]]:
        """One-hop table-level neighborhood: (upstream, downstream), each
        sorted and without self-loops."""
        if relation not in self.nodes:
            raise UnknownRelation(relation)
        upstream: set[str] = set()
        downstream: set[str] = set()
        for src, dst in self.edges:
            if dst.relation == relation and src.relation != relation:
                upstream.add(src.relation)
            if src.relation == relation and dst.relation != relation:
                downstream.add(dst.relation)
        return sorted(upstream), sorted(downstream)

    # -- serialization --------------------------------------------------

    def to_json(self) -> str:
        doc = {
            "version": JSON_VERSION,
            "nodes": {
                relation: {"kind": node.kind, "columns": list(node.columns)}
                for relation, node in self.nodes.items()
            },
            "edges": [
                {"src": str(src), "dst": str(dst), "kind": kind}
                for (src, dst), kind in sorted(
                    self.edges.items(), key=lambda item: (str(item[0][0]), str(item[0][1]))
                )
            ],
            "diagnostics": [diag.to_json() for diag in self.diagnostics],
        }
        return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @staticmethod
    def from_json(text: str) -> "LineageGraph":
        doc = json.loads(text)
        version = doc.get("version")
        if version != JSON_VERSION:
            raise ValueError(f"unsupported lineage document version: {version!r}")
        graph = LineageGraph()
        for relation, node_doc in doc["nodes"].items():
            graph.nodes[relation] = GraphNode(
                node_doc["kind"], list(node_doc["columns"])
            )
        for edge_doc in doc["edges"]:
            graph.edges[
                (ColumnRef.parse(edge_doc["src"]), ColumnRef.parse(edge_doc["dst"]))
            ] = edge_doc["kind"]
        for diag_doc in doc.get("diagnostics", []):
            graph.diagnostics.append(Diagnostic.from_json(diag_doc))
        return graph


def merge(
    lineages: dict[str, QueryLineage],
    catalog: Catalog,
    registry=None,
    diagnostics: list[Diagnostic] | None = None,
) -> LineageGraph:
    """Combine per-query lineages into one graph.

    Node kinds: the registry decides view vs query for extracted ids (all
    ids count as views when no registry is given); every other relation the
    catalog knows is a base table.
    """
    graph = LineageGraph()
    if diagnostics:
        graph.diagnostics.extend(diagnostics)

    for query_id, lineage in lineages.items():
        kind = registry.node_kind(query_id) if registry is not None else NODE_VIEW
        node = graph.ensure_node(query_id, kind)
        for name in lineage.output_names():
            if name not in node.columns:
                node.columns.append(name)

    for relation in catalog.relations():
        if relation in lineages:
            continue
        known = catalog.columns_of(relation)
        node = graph.ensure_node(relation, NODE_BASE)
        for column in known[0]:
            if column not in node.columns:
                node.columns.append(column)

    for query_id, lineage in lineages.items():
        for output in lineage.outputs:
            dst = ColumnRef(query_id, output.name)
            graph.ensure_column(dst)
            for src in output.contributors:
                graph.ensure_column(src)
                kind = EDGE_BOTH if src in lineage.referenced else EDGE_CONTRIBUTES
                graph.add_edge(src, dst, kind)
        for src in lineage.referenced:
            graph.ensure_column(src)
            for output in lineage.outputs:
                if src in output.contributors:
                    continue
                graph.add_edge(src, ColumnRef(query_id, output.name), EDGE_REFERENCES)

    return graph


def _merge_kinds(a: str, b: str) -> str:
    if a == b:
        return a
    return EDGE_BOTH
