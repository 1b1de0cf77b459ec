"""Per-query column lineage extraction.

The engine walks a normalized plan tree in post-order, keeping per query
frame: the relations scanned so far, an ordered binding list for column
resolution, the set of referenced columns, and the most recent projection.
CTE and derived-table bodies are extracted in their own frames and bound
eagerly, so a reference through them resolves straight to base or view
columns and no later flattening pass is needed.

Scanning a registered query whose output schema is not resolved yet aborts
the walk with a Deferred marker; the scheduler is responsible for retrying
once the dependency has been extracted. A retry restarts from scratch:
nothing from the abandoned attempt (observations aside) is kept.
"""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import Catalog, ColumnRef, UnknownQualifier, UnresolvedStar
from .diagnostics import SEVERITY_WARNING, Diagnostic
from .frontend.nodes import (
    BinaryOp,
    Case,
    Cast,
    ColumnRefExpr,
    DerivedTable,
    ExprNode,
    Filter,
    FuncCall,
    GroupBy,
    Join,
    Limit,
    Literal,
    Project,
    ProjectionItem,
    QueryNode,
    Scan,
    SetOp,
    Sort,
    SubqueryExpr,
    With,
)
from .registry import QueryDictionary

BINDING_BASE = "base"
BINDING_VIEW = "view"
BINDING_INLINE = "inline"


@dataclass(frozen=True)
class OutputColumn:
    """One output column of a query and the columns its value comes from."""

    name: str
    contributors: frozenset[ColumnRef]


@dataclass(frozen=True)
class QueryLineage:
    """The lineage of one query: scanned relations, outputs, referenced set."""

    query_id: str
    tables: frozenset[str]
    outputs: tuple[OutputColumn, ...]
    referenced: frozenset[ColumnRef]

    def output_names(self) -> list[str]:
        return [column.name for column in self.outputs]

    def contributors_of(self, name: str) -> frozenset[ColumnRef] | None:
        for column in self.outputs:
            if column.name == name:
                return column.contributors
        return None


@dataclass(frozen=True)
class Deferred:
    """Extraction could not proceed: missing names the blocking relation."""

    missing: str


class _DeferSignal(Exception):
    def __init__(self, missing: str):
        super().__init__(missing)
        self.missing = missing


@dataclass
class _Binding:
    """One name visible in a frame's FROM scope."""

    name: str
    relation: str
    kind: str
    columns: tuple[str, ...] | None = None
    lineage: QueryLineage | None = None
    uncertain: bool = False

    def known_columns(self, catalog: Catalog) -> list[str] | None:
        if self.kind == BINDING_INLINE:
            return self.lineage.output_names()
        if self.columns is not None:
            return list(self.columns)
        known = catalog.columns_of(self.relation)
        return None if known is None else known[0]

    def is_complete(self, catalog: Catalog) -> bool:
        if self.kind == BINDING_INLINE:
            return True
        if self.kind == BINDING_VIEW:
            return True
        return catalog.is_complete(self.relation)


class Engine:
    """Runs extraction against a shared catalog and query dictionary."""

    def __init__(
        self,
        registry: QueryDictionary | None,
        catalog: Catalog,
        unresolvable: set[str] | None = None,
    ):
        self.registry = registry
        self.catalog = catalog
        # Registered ids that must never defer again (cycle members); scans
        # of them behave like scans of incomplete base tables.
        self.unresolvable = unresolvable if unresolvable is not None else set()
        self.diagnostics: list[Diagnostic] = []
        self.traces: dict[str, list[tuple]] = {}
        self._attempt_diags: list[Diagnostic] = []
        self._attempt_trace: list[tuple] = []
        self._current_query: str | None = None

    def extract(self, query_id: str, body: QueryNode) -> QueryLineage | Deferred:
        """Extract lineage for one registered query.

        Returns Deferred when the query scans a registered relation whose
        schema is not available yet. Diagnostics and the rule trace are kept
        only for attempts that complete.
        """
        self._attempt_diags = []
        self._attempt_trace = []
        self._current_query = query_id
        try:
            frame = _Frame(self, cte_chain=(), parent=None)
            frame.walk(body)
            lineage = frame.finalize(query_id)
        except _DeferSignal as signal:
            return Deferred(signal.missing)
        finally:
            self._current_query = None
        self.diagnostics.extend(self._attempt_diags)
        self.traces[query_id] = list(self._attempt_trace)
        return lineage

    # -- hooks used by frames ------------------------------------------

    def resolve_registered(self, relation: str) -> str | None:
        if self.registry is None:
            return None
        return self.registry.resolve_name(relation)

    def subquery_lineage(self, body: QueryNode, cte_chain: tuple, parent) -> QueryLineage:
        frame = _Frame(self, cte_chain=cte_chain, parent=parent)
        frame.walk(body)
        return frame.finalize("")

    def diag(self, code: str, message: str, severity: str = SEVERITY_WARNING) -> None:
        self._attempt_diags.append(
            Diagnostic(severity, code, message, self._current_query)
        )

    def trace(self, rule: str, detail) -> None:
        self._attempt_trace.append((rule, detail))


class _Frame:
    """State for one query scope (top level, CTE body, derived table or
    expression subquery)."""

    def __init__(self, engine: Engine, cte_chain: tuple, parent: "_Frame | None"):
        self.engine = engine
        self.cte_chain = cte_chain
        self.parent = parent
        self.bindings: list[_Binding] = []
        self.tables: set[str] = set()
        self.referenced: set[ColumnRef] = set()
        self.projection: list[tuple[str, set[ColumnRef]]] | None = None
        self.local_ctes: dict[str, QueryLineage] = {}
        self.pending_ordinals: list[int] = []

    # -- walking ----------------------------------------------------------

    def walk(self, node: QueryNode) -> None:
        if isinstance(node, Scan):
            self._walk_scan(node)
        elif isinstance(node, Project):
            if node.input is not None:
                self.walk(node.input)
            self._walk_project(node)
        elif isinstance(node, Filter):
            self.walk(node.input)
            refs = self._expr_refs(node.predicate)
            self.referenced |= refs
            self._trace_refs("filter", refs)
        elif isinstance(node, Join):
            self.walk(node.left)
            self.walk(node.right)
            refs = self._expr_refs(node.condition) if node.condition is not None else set()
            self.referenced |= refs
            self._trace_refs("join", refs)
        elif isinstance(node, GroupBy):
            self.walk(node.input)
            refs: set[ColumnRef] = set()
            for key in node.keys:
                ordinal = _as_ordinal(key)
                if ordinal is not None:
                    self.pending_ordinals.append(ordinal)
                else:
                    refs |= self._expr_refs(key)
            self.referenced |= refs
            self._trace_refs("group_by", refs)
        elif isinstance(node, Sort):
            self.walk(node.input)
            refs = self._sort_refs(node.keys)
            self.referenced |= refs
            self._trace_refs("sort", refs)
        elif isinstance(node, Limit):
            self.walk(node.input)
            self.engine.trace("limit", node.count)
        elif isinstance(node, SetOp):
            self._walk_set_op(node)
        elif isinstance(node, With):
            self._walk_with(node)
        elif isinstance(node, DerivedTable):
            self._walk_derived(node)
        else:
            raise TypeError(f"unexpected plan node: {node!r}")

    def _walk_scan(self, node: Scan) -> None:
        relation = node.relation
        binding_name = node.binding_name

        lineage = self._lookup_cte(relation)
        if lineage is not None:
            self.bindings.append(
                _Binding(binding_name, relation, BINDING_INLINE, lineage=lineage)
            )
            self.tables |= set(lineage.tables)
            self.referenced |= set(lineage.referenced)
            self.engine.trace("scan", relation)
            return

        canonical = self.engine.resolve_registered(relation)
        if canonical is not None:
            if self.engine.catalog.is_complete(canonical):
                columns, _ = self.engine.catalog.columns_of(canonical)
                uncertain = any(name.endswith(".*") for name in columns)
                self.bindings.append(
                    _Binding(
                        binding_name,
                        canonical,
                        BINDING_VIEW,
                        columns=tuple(columns),
                        uncertain=uncertain,
                    )
                )
                self.tables.add(canonical)
                self.engine.trace("scan", canonical)
                return
            if canonical not in self.engine.unresolvable:
                raise _DeferSignal(canonical)
            relation = canonical

        self.tables.add(relation)
        self.bindings.append(_Binding(binding_name, relation, BINDING_BASE))
        self.engine.trace("scan", relation)

    def _walk_with(self, node: With) -> None:
        for name, body in node.bindings:
            chain = (dict(self.local_ctes),) + self.cte_chain
            lineage = self.engine.subquery_lineage(body, chain, parent=None)
            self.local_ctes[name] = lineage
            self.engine.trace("cte", name)
        self.walk(node.input)

    def _walk_derived(self, node: DerivedTable) -> None:
        chain = (dict(self.local_ctes),) + self.cte_chain
        lineage = self.engine.subquery_lineage(node.query, chain, parent=None)
        self.bindings.append(
            _Binding(node.alias, node.alias, BINDING_INLINE, lineage=lineage)
        )
        self.tables |= set(lineage.tables)
        self.referenced |= set(lineage.referenced)
        self.engine.trace("derived", node.alias)

    def _walk_set_op(self, node: SetOp) -> None:
        left = self._walk_branch(node.left)
        right = self._walk_branch(node.right)
        for _, contributors in left:
            self.referenced |= contributors
        for _, contributors in right:
            self.referenced |= contributors
        if len(left) != len(right):
            self.engine.diag(
                "set-op-arity",
                f"set operation branches have {len(left)} and {len(right)} columns",
            )
        width = min(len(left), len(right))
        self.projection = [
            (left[i][0], left[i][1] | right[i][1]) for i in range(width)
        ]
        self.bindings = []
        self.engine.trace("set_op", node.op)

    def _walk_branch(self, node: QueryNode) -> list[tuple[str, set[ColumnRef]]]:
        saved = (self.bindings, self.projection, self.pending_ordinals)
        self.bindings, self.projection, self.pending_ordinals = [], None, []
        self.walk(node)
        branch = self.projection or []
        self.bindings, self.projection, self.pending_ordinals = saved
        return branch

    def _walk_project(self, node: Project) -> None:
        items: list[tuple[str, set[ColumnRef]]] = []
        for item in node.items:
            if item.is_star:
                items.extend(self._expand_star_item(item))
            else:
                items.append((item.output_name, self._expr_refs(item.expr)))
        for ordinal in self.pending_ordinals:
            if 1 <= ordinal <= len(items):
                self.referenced |= items[ordinal - 1][1]
            else:
                self.engine.diag(
                    "ordinal-out-of-range",
                    f"position {ordinal} is outside the {len(items)}-column projection",
                )
        self.pending_ordinals = []
        self.projection = items
        self.engine.trace("project", [name for name, _ in items])

    # -- stars ----------------------------------------------------------

    def _expand_star_item(self, item: ProjectionItem) -> list[tuple[str, set[ColumnRef]]]:
        if item.star_qualifier is not None:
            binding = self._find_binding(item.star_qualifier)
            if binding is None:
                self.engine.diag(
                    "unknown-qualifier",
                    f"star qualifier {item.star_qualifier!r} is not in scope",
                )
                return []
            scope = [binding]
        else:
            scope = list(self.bindings)
            if not scope:
                self.engine.diag("unresolved-star", "star with no FROM scope")
                return []
        expanded: list[tuple[str, set[ColumnRef]]] = []
        for binding in scope:
            expanded.extend(self._expand_binding_star(binding))
        return expanded

    def _expand_binding_star(self, binding: _Binding) -> list[tuple[str, set[ColumnRef]]]:
        if binding.kind == BINDING_INLINE:
            return [
                (column.name, set(column.contributors))
                for column in binding.lineage.outputs
            ]
        try:
            elements = self.engine.catalog.expand_star(
                binding.name, [(binding.name, binding.relation)]
            )
        except UnknownQualifier:  # scope is built from the binding itself
            raise AssertionError("binding vanished from its own scope")
        expanded: list[tuple[str, set[ColumnRef]]] = []
        for element in elements:
            if isinstance(element, UnresolvedStar):
                self.engine.diag(
                    "unresolved-star",
                    f"columns of {element.relation} are not known; "
                    f"emitting placeholder {element.placeholder}",
                )
                expanded.append(
                    (element.placeholder, {ColumnRef(element.relation, "*")})
                )
            else:
                expanded.append((element.column, {element}))
        return expanded

    # -- column resolution ------------------------------------------------

    def resolve(self, qualifier: str | None, column: str) -> set[ColumnRef]:
        refs = self._resolve(qualifier, column)
        if refs is None:
            target = column if qualifier is None else f"{qualifier}.{column}"
            self.engine.diag(
                "unresolvable-column", f"column {target!r} is not in scope"
            )
            return set()
        return refs

    def _resolve(self, qualifier: str | None, column: str) -> set[ColumnRef] | None:
        """Refs for a column, or None when the name resolves to nothing.

        An empty set is a successful resolution (the column exists but has
        no base contributors, e.g. a literal-valued CTE output).
        """
        if qualifier is not None:
            binding = self._find_binding(qualifier)
            if binding is not None:
                return self._refs_through(binding, column)
            if self.parent is not None:
                return self.parent._resolve(qualifier, column)
            return None

        known_hits = []
        open_bindings = []
        for binding in self.bindings:
            columns = binding.known_columns(self.engine.catalog)
            if columns is not None and column in columns:
                known_hits.append(binding)
            elif not binding.is_complete(self.engine.catalog) or binding.uncertain:
                open_bindings.append(binding)
        if len(known_hits) == 1:
            return self._refs_through(known_hits[0], column)
        if len(known_hits) > 1:
            self.engine.diag(
                "ambiguous-column",
                f"column {column!r} matches "
                + ", ".join(binding.name for binding in known_hits),
            )
            refs: set[ColumnRef] = set()
            for binding in known_hits:
                refs |= self._refs_through(binding, column) or set()
            return refs
        if len(open_bindings) == 1:
            return self._refs_through(open_bindings[0], column)
        if len(open_bindings) > 1:
            self.engine.diag(
                "ambiguous-column",
                f"column {column!r} could belong to any of "
                + ", ".join(binding.relation for binding in open_bindings),
            )
            refs = set()
            for binding in open_bindings:
                refs |= self._refs_through(binding, column) or set()
            return refs
        if self.parent is not None:
            return self.parent._resolve(None, column)
        return None

    def _refs_through(self, binding: _Binding, column: str) -> set[ColumnRef]:
        if binding.kind == BINDING_INLINE:
            contributors = binding.lineage.contributors_of(column)
            if contributors is None:
                self.engine.diag(
                    "unknown-column",
                    f"{binding.name} has no output column {column!r}",
                )
                return set()
            return set(contributors)
        if binding.is_complete(self.engine.catalog):
            columns = binding.known_columns(self.engine.catalog) or []
            if column not in columns:
                if binding.uncertain:
                    # The relation's schema contains a star placeholder, so
                    # membership cannot be refuted; attribute optimistically.
                    return {ColumnRef(binding.relation, column)}
                self.engine.diag(
                    "unknown-column",
                    f"{binding.relation} has no column {column!r}",
                )
                return set()
            return {ColumnRef(binding.relation, column)}
        self.engine.catalog.observe(binding.relation, column)
        return {ColumnRef(binding.relation, column)}

    def _find_binding(self, name: str) -> _Binding | None:
        for binding in self.bindings:
            if binding.name == name or binding.relation == name:
                return binding
        return None

    def _lookup_cte(self, name: str) -> QueryLineage | None:
        if name in self.local_ctes:
            return self.local_ctes[name]
        for scope in self.cte_chain:
            if name in scope:
                return scope[name]
        return None

    # -- expressions --------------------------------------------------------

    def _expr_refs(self, expr: ExprNode) -> set[ColumnRef]:
        refs: set[ColumnRef] = set()
        self._collect_expr(expr, refs)
        return refs

    def _collect_expr(self, expr: ExprNode, refs: set[ColumnRef]) -> None:
        if isinstance(expr, ColumnRefExpr):
            refs |= self.resolve(expr.qualifier, expr.column)
        elif isinstance(expr, BinaryOp):
            self._collect_expr(expr.left, refs)
            self._collect_expr(expr.right, refs)
        elif isinstance(expr, FuncCall):
            for arg in expr.args:
                self._collect_expr(arg, refs)
        elif isinstance(expr, Case):
            for condition, result in expr.branches:
                if condition is not None:
                    self._collect_expr(condition, refs)
                self._collect_expr(result, refs)
        elif isinstance(expr, Cast):
            self._collect_expr(expr.operand, refs)
        elif isinstance(expr, SubqueryExpr):
            chain = (dict(self.local_ctes),) + self.cte_chain
            lineage = self.engine.subquery_lineage(expr.query, chain, parent=self)
            self.tables |= set(lineage.tables)
            self.referenced |= set(lineage.referenced)
            for column in lineage.outputs:
                refs |= set(column.contributors)
        # Literals carry no lineage.

    def _sort_refs(self, keys: tuple[ExprNode, ...]) -> set[ColumnRef]:
        refs: set[ColumnRef] = set()
        projection = self.projection or []
        by_name = {name: contributors for name, contributors in projection}
        for key in keys:
            ordinal = _as_ordinal(key)
            if ordinal is not None:
                if 1 <= ordinal <= len(projection):
                    refs |= projection[ordinal - 1][1]
                else:
                    self.engine.diag(
                        "ordinal-out-of-range",
                        f"position {ordinal} is outside the "
                        f"{len(projection)}-column projection",
                    )
            elif (
                isinstance(key, ColumnRefExpr)
                and key.qualifier is None
                and key.column in by_name
            ):
                refs |= by_name[key.column]
            else:
                refs |= self._expr_refs(key)
        return refs

    # -- finishing ----------------------------------------------------------

    def finalize(self, query_id: str) -> QueryLineage:
        outputs = tuple(
            OutputColumn(name, frozenset(contributors))
            for name, contributors in (self.projection or [])
        )
        return QueryLineage(
            query_id,
            frozenset(self.tables),
            outputs,
            frozenset(self.referenced),
        )

    def _trace_refs(self, rule: str, refs: set[ColumnRef]) -> None:
        self.engine.trace(rule, frozenset(str(ref) for ref in refs))


def _as_ordinal(expr: ExprNode) -> int | None:
    """Positional GROUP BY / ORDER BY key, or None."""
    if (
        isinstance(expr, Literal)
        and isinstance(expr.value, int)
        and not isinstance(expr.value, bool)
    ):
        return expr.value
    return None
