"""Normalized statement and plan-tree node types produced by the parser.

Every node is a frozen dataclass with tuple-valued children, so trees are
hashable, comparable by value and safe to share between pipeline stages.
The parser is the only producer; the extraction engine is the main consumer
and relies on the invariants stated in the docstrings below.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

# ---------------------------------------------------------------------------
# Scalar expressions


@dataclass(frozen=True)
class ColumnRefExpr:
    """A column reference, optionally qualified by a table alias or name."""

    qualifier: str | None
    column: str


@dataclass(frozen=True)
class Literal:
    """A constant. value is int, float, str, bool or None (for NULL)."""

    value: object


@dataclass(frozen=True)
class FuncCall:
    """Function application. name is lowercased.

    count(*) is represented with an empty argument tuple; every other call
    carries its arguments in order. extract(YEAR FROM x) is normalized to
    FuncCall("extract", (Literal("year"), x)).
    """

    name: str
    args: tuple["ExprNode", ...]


@dataclass(frozen=True)
class BinaryOp:
    """Infix operator application. op is the lowercased operator token."""

    op: str
    left: "ExprNode"
    right: "ExprNode"


@dataclass(frozen=True)
class Case:
    """Searched CASE. branches are (condition, result) pairs; the ELSE arm,
    when present, is a final pair with condition None. Simple CASE is
    desugared to this form by the parser."""

    branches: tuple[tuple["ExprNode | None", "ExprNode"], ...]


@dataclass(frozen=True)
class Cast:
    """CAST(expr AS type). type_name is the canonical lowercased type text."""

    operand: "ExprNode"
    type_name: str


@dataclass(frozen=True)
class SubqueryExpr:
    """A scalar or IN-list subquery appearing in expression position."""

    query: "QueryNode"


ExprNode = Union[ColumnRefExpr, Literal, FuncCall, BinaryOp, Case, Cast, SubqueryExpr]


# ---------------------------------------------------------------------------
# Plan tree


@dataclass(frozen=True)
class Scan:
    """A FROM item naming a base table, view, CTE or registered query."""

    relation: str
    alias: str | None = None

    @property
    def binding_name(self) -> str:
        """Name this scan is referred to by within its query."""
        if self.alias is not None:
            return self.alias
        return self.relation.rsplit(".", 1)[-1]


@dataclass(frozen=True)
class ProjectionItem:
    """One SELECT-list entry.

    Exactly one of two shapes: a star item (is_star True, expr None,
    output_name None, star_qualifier optionally naming the relation), or an
    expression item (is_star False, expr set, output_name always set: the
    alias, the bare column name, or a parser-generated expr_<k>).
    """

    expr: ExprNode | None
    output_name: str | None
    is_star: bool = False
    star_qualifier: str | None = None


@dataclass(frozen=True)
class Project:
    items: tuple[ProjectionItem, ...]
    input: "QueryNode | None"
    distinct: bool = False


@dataclass(frozen=True)
class Filter:
    """WHERE when below the projection, HAVING when above a GroupBy."""

    predicate: ExprNode
    input: "QueryNode"


@dataclass(frozen=True)
class Join:
    """kind is one of inner, left, right, full, cross. Comma-separated FROM
    items become cross joins with no condition."""

    kind: str
    condition: ExprNode | None
    left: "QueryNode"
    right: "QueryNode"


@dataclass(frozen=True)
class SetOp:
    """op is one of union, union_all, intersect, except."""

    op: str
    left: "QueryNode"
    right: "QueryNode"


@dataclass(frozen=True)
class With:
    """Non-recursive WITH. bindings are (name, body) in source order; each
    body may scan earlier bindings of the same clause but not later ones."""

    bindings: tuple[tuple[str, "QueryNode"], ...]
    input: "QueryNode"


@dataclass(frozen=True)
class DerivedTable:
    """A parenthesized subquery in FROM position. The alias is mandatory."""

    alias: str
    query: "QueryNode"


@dataclass(frozen=True)
class GroupBy:
    """keys are the grouping expressions; aggregates collects the aggregate
    calls found in the projection and HAVING for inspection convenience."""

    keys: tuple[ExprNode, ...]
    aggregates: tuple[ExprNode, ...]
    input: "QueryNode"


@dataclass(frozen=True)
class Sort:
    keys: tuple[ExprNode, ...]
    input: "QueryNode"


@dataclass(frozen=True)
class Limit:
    count: int
    input: "QueryNode"


QueryNode = Union[
    Scan, Project, Filter, Join, SetOp, With, DerivedTable, GroupBy, Sort, Limit
]


# Statement kinds recognized at the top level.
STMT_CREATE_VIEW = "create_view"
STMT_CREATE_TABLE_AS = "create_table_as"
STMT_BARE_SELECT = "bare_select"


@dataclass(frozen=True)
class NormalizedStatement:
    """One parsed statement: what kind it is, the name it defines (None for
    bare selects; the registry assigns one) and the normalized body."""

    kind: str
    name: str | None
    body: QueryNode
    replace: bool = False


def child_queries(node: QueryNode) -> tuple[QueryNode, ...]:
    """Direct plan-tree children of node, in evaluation order."""
    if isinstance(node, Scan):
        return ()
    if isinstance(node, Project):
        return () if node.input is None else (node.input,)
    if isinstance(node, (Filter, GroupBy, Sort, Limit)):
        return (node.input,)
    if isinstance(node, Join):
        return (node.left, node.right)
    if isinstance(node, SetOp):
        return (node.left, node.right)
    if isinstance(node, With):
        return tuple(body for _, body in node.bindings) + (node.input,)
    if isinstance(node, DerivedTable):
        return (node.query,)
    raise TypeError(f"not a query node: {node!r}")
