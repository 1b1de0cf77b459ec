"""SQL frontend: script splitting, tokenizing and parsing."""

from .errors import ParseError, UnsupportedStatement, UnterminatedComment, UnterminatedString
from .nodes import (
    STMT_BARE_SELECT,
    STMT_CREATE_TABLE_AS,
    STMT_CREATE_VIEW,
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
    NormalizedStatement,
    Project,
    ProjectionItem,
    QueryNode,
    Scan,
    SetOp,
    Sort,
    SubqueryExpr,
    With,
    child_queries,
)
from .parser import parse_query_text, parse_statement
from .splitter import RawStatement, split_script

__all__ = [
    "ParseError",
    "UnsupportedStatement",
    "UnterminatedComment",
    "UnterminatedString",
    "STMT_BARE_SELECT",
    "STMT_CREATE_TABLE_AS",
    "STMT_CREATE_VIEW",
    "BinaryOp",
    "Case",
    "Cast",
    "ColumnRefExpr",
    "DerivedTable",
    "ExprNode",
    "Filter",
    "FuncCall",
    "GroupBy",
    "Join",
    "Limit",
    "Literal",
    "NormalizedStatement",
    "Project",
    "ProjectionItem",
    "QueryNode",
    "Scan",
    "SetOp",
    "Sort",
    "SubqueryExpr",
    "With",
    "child_queries",
    "parse_query_text",
    "parse_statement",
    "RawStatement",
    "split_script",
]
