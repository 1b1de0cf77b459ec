"""Recursive-descent parser for the supported SQL subset.

parse_statement() turns one statement's text into a NormalizedStatement
whose body is a plan tree built from the nodes module. Normalization rules:

- unquoted identifiers fold to lowercase, quoted ones keep their exact text
- qualified names are joined with "." after per-part normalization
- IN lists, BETWEEN, NOT and simple CASE are desugared to core forms
- HAVING becomes a Filter above a GroupBy; WHERE a Filter below it
- ORDER BY / LIMIT sit above the projection (and outside set operations)
- every non-star projection item gets an output name: its alias, its bare
  column name, or expr_<k> where k is the item's 0-based position
"""

from __future__ import annotations

from .errors import ParseError, UnsupportedStatement
from .lexer import (
    TOKEN_EOF,
    TOKEN_IDENT,
    TOKEN_NUMBER,
    TOKEN_OP,
    TOKEN_QUOTED_IDENT,
    TOKEN_STRING,
    Token,
    tokenize,
)
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
)

# Unquoted words that cannot be inferred as aliases.
_NON_ALIAS = {
    "SELECT", "FROM", "WHERE", "GROUP", "BY", "HAVING", "ORDER", "LIMIT",
    "JOIN", "ON", "INNER", "LEFT", "RIGHT", "FULL", "CROSS", "OUTER",
    "UNION", "INTERSECT", "EXCEPT", "AS", "WITH", "AND", "OR", "NOT",
    "CASE", "WHEN", "THEN", "ELSE", "END", "IS", "NULL", "LIKE", "IN",
    "BETWEEN", "USING", "NATURAL", "ASC", "DESC", "OVER", "EXISTS", "SET",
    "OFFSET",
}

# Statement-leading keywords we recognize but do not analyze.
_UNSUPPORTED_LEADS = {
    "INSERT", "UPDATE", "DELETE", "MERGE", "DROP", "ALTER", "TRUNCATE",
    "GRANT", "REVOKE", "BEGIN", "COMMIT", "ROLLBACK", "SET", "EXPLAIN",
    "VACUUM", "ANALYZE", "COPY", "CALL", "USE", "SHOW", "DESCRIBE",
}

_COMPARISONS = {"=", "<>", "!=", "<", "<=", ">", ">="}

_AGGREGATE_NAMES = {"count", "sum", "avg", "min", "max"}


def parse_statement(text: str) -> NormalizedStatement:
    """Parse a single SQL statement.

    Raises ParseError for malformed input and UnsupportedStatement for
    well-formed statements outside the supported subset.
    """
    parser = _Parser(tokenize(text))
    statement = parser.parse_statement()
    parser.match_op(";")
    parser.expect_eof()
    return statement


def parse_query_text(text: str) -> QueryNode:
    """Parse text that must be a plain query (no CREATE wrapper)."""
    parser = _Parser(tokenize(text))
    body = parser.parse_query()
    parser.match_op(";")
    parser.expect_eof()
    return body


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token access -------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        index = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[index]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != TOKEN_EOF:
            self.pos += 1
        return tok

    def check_kw(self, word: str) -> bool:
        return self.peek().is_kw(word)

    def match_kw(self, word: str) -> bool:
        if self.check_kw(word):
            self.advance()
            return True
        return False

    def expect_kw(self, word: str) -> None:
        if not self.match_kw(word):
            tok = self.peek()
            raise ParseError(f"expected {word}, found {tok.value!r}", tok.position)

    def check_op(self, symbol: str) -> bool:
        return self.peek().is_op(symbol)

    def match_op(self, symbol: str) -> bool:
        if self.check_op(symbol):
            self.advance()
            return True
        return False

    def expect_op(self, symbol: str) -> None:
        if not self.match_op(symbol):
            tok = self.peek()
            raise ParseError(f"expected {symbol!r}, found {tok.value!r}", tok.position)

    def expect_eof(self) -> None:
        tok = self.peek()
        if tok.kind != TOKEN_EOF:
            raise ParseError(f"unexpected trailing input {tok.value!r}", tok.position)

    def _is_ident(self, ahead: int = 0) -> bool:
        return self.peek(ahead).kind in (TOKEN_IDENT, TOKEN_QUOTED_IDENT)

    def expect_ident(self) -> str:
        tok = self.peek()
        if tok.kind == TOKEN_IDENT:
            self.advance()
            return tok.value.lower()
        if tok.kind == TOKEN_QUOTED_IDENT:
            self.advance()
            return tok.value
        raise ParseError(f"expected an identifier, found {tok.value!r}", tok.position)

    def parse_qualified_name(self) -> str:
        parts = [self.expect_ident()]
        while self.check_op(".") and self._is_ident(1):
            self.advance()
            parts.append(self.expect_ident())
        return ".".join(parts)

    # -- statements ---------------------------------------------------

    def parse_statement(self) -> NormalizedStatement:
        tok = self.peek()
        if tok.is_kw("CREATE"):
            return self._parse_create()
        if tok.kind == TOKEN_IDENT and tok.value.upper() in _UNSUPPORTED_LEADS:
            raise UnsupportedStatement(
                f"{tok.value.upper()} statements are not supported", tok.position
            )
        if tok.is_kw("SELECT") or tok.is_kw("WITH") or tok.is_op("("):
            return NormalizedStatement(STMT_BARE_SELECT, None, self.parse_query())
        raise ParseError(f"expected a statement, found {tok.value!r}", tok.position)

    def _parse_create(self) -> NormalizedStatement:
        start = self.peek()
        self.expect_kw("CREATE")
        replace = False
        if self.match_kw("OR"):
            self.expect_kw("REPLACE")
            replace = True
        if self.match_kw("VIEW"):
            name = self.parse_qualified_name()
            if self.check_op("("):
                raise UnsupportedStatement(
                    "CREATE VIEW with an explicit column list is not supported",
                    self.peek().position,
                )
            self.expect_kw("AS")
            return NormalizedStatement(STMT_CREATE_VIEW, name, self.parse_query(), replace)
        if not replace and self.match_kw("TABLE"):
            name = self.parse_qualified_name()
            if self.match_kw("AS"):
                return NormalizedStatement(STMT_CREATE_TABLE_AS, name, self.parse_query())
            raise UnsupportedStatement(
                "CREATE TABLE without AS SELECT is not supported", start.position
            )
        raise UnsupportedStatement(
            f"CREATE {self.peek().value.upper()} is not supported", start.position
        )

    # -- queries ------------------------------------------------------

    def parse_query(self) -> QueryNode:
        bindings: list[tuple[str, QueryNode]] = []
        if self.check_kw("WITH"):
            self.advance()
            if self.check_kw("RECURSIVE"):
                raise UnsupportedStatement(
                    "recursive WITH is not supported", self.peek().position
                )
            while True:
                name = self.expect_ident()
                if self.check_op("("):
                    raise UnsupportedStatement(
                        "WITH bindings with column lists are not supported",
                        self.peek().position,
                    )
                self.expect_kw("AS")
                self.expect_op("(")
                bindings.append((name, self.parse_query()))
                self.expect_op(")")
                if not self.match_op(","):
                    break

        node = self._parse_set_expr()

        if self.check_kw("ORDER"):
            self.advance()
            self.expect_kw("BY")
            keys = [self._parse_sort_key()]
            while self.match_op(","):
                keys.append(self._parse_sort_key())
            node = Sort(tuple(keys), node)
        if self.check_kw("LIMIT"):
            self.advance()
            tok = self.peek()
            if tok.kind != TOKEN_NUMBER or "." in tok.value:
                raise ParseError("LIMIT expects an integer", tok.position)
            self.advance()
            node = Limit(int(tok.value), node)
        if self.check_kw("OFFSET"):
            raise UnsupportedStatement("OFFSET is not supported", self.peek().position)

        if bindings:
            node = With(tuple(bindings), node)
        return node

    def _parse_sort_key(self) -> ExprNode:
        expr = self.parse_expr()
        if self.match_kw("ASC") or self.match_kw("DESC"):
            pass  # direction has no lineage effect
        return expr

    def _parse_set_expr(self) -> QueryNode:
        node = self._parse_set_term()
        while self.check_kw("UNION") or self.check_kw("EXCEPT"):
            op_tok = self.advance()
            op = op_tok.value.lower()
            if op == "union" and self.match_kw("ALL"):
                op = "union_all"
            elif self.check_kw("ALL"):
                raise UnsupportedStatement(
                    "EXCEPT ALL is not supported", self.peek().position
                )
            node = SetOp(op, node, self._parse_set_term())
        return node

    def _parse_set_term(self) -> QueryNode:
        node = self._parse_set_primary()
        while self.check_kw("INTERSECT"):
            self.advance()
            if self.check_kw("ALL"):
                raise UnsupportedStatement(
                    "INTERSECT ALL is not supported", self.peek().position
                )
            node = SetOp("intersect", node, self._parse_set_primary())
        return node

    def _parse_set_primary(self) -> QueryNode:
        if self.match_op("("):
            node = self.parse_query()
            self.expect_op(")")
            return node
        if self.check_kw("SELECT"):
            return self._parse_select_core()
        tok = self.peek()
        raise ParseError(f"expected SELECT, found {tok.value!r}", tok.position)

    def _parse_select_core(self) -> QueryNode:
        self.expect_kw("SELECT")
        distinct = self.match_kw("DISTINCT")
        if not distinct:
            self.match_kw("ALL")

        raw_items: list[tuple] = [self._parse_projection_item()]
        while self.match_op(","):
            raw_items.append(self._parse_projection_item())

        source: QueryNode | None = None
        where = None
        group_keys: list[ExprNode] = []
        having = None
        if self.match_kw("FROM"):
            source = self._parse_from_clause()
        if self.check_kw("WHERE"):
            where_tok = self.advance()
            if source is None:
                raise ParseError("WHERE requires a FROM clause", where_tok.position)
            where = self.parse_expr()
        if self.check_kw("GROUP"):
            self.advance()
            self.expect_kw("BY")
            group_keys.append(self.parse_expr())
            while self.match_op(","):
                group_keys.append(self.parse_expr())
        if self.check_kw("HAVING"):
            self.advance()
            having = self.parse_expr()

        items = self._finish_items(raw_items)

        if where is not None:
            source = Filter(where, source)
        if group_keys or having is not None:
            if source is None:
                raise ParseError("GROUP BY requires a FROM clause", self.peek().position)
            aggregates = _collect_aggregates(
                [item.expr for item in items if item.expr is not None]
                + ([having] if having is not None else [])
            )
            source = GroupBy(tuple(group_keys), tuple(aggregates), source)
            if having is not None:
                source = Filter(having, source)
        return Project(tuple(items), source, distinct)

    def _parse_projection_item(self) -> tuple:
        if self.match_op("*"):
            return ("star", None)
        qualifier = self._try_qualified_star()
        if qualifier is not None:
            return ("star", qualifier)
        expr = self.parse_expr()
        alias = None
        if self.match_kw("AS"):
            alias = self.expect_ident()
        elif self._is_alias_candidate():
            alias = self.expect_ident()
        return ("expr", expr, alias)

    def _try_qualified_star(self) -> str | None:
        """Match qname.* without consuming anything on failure."""
        j = self.pos
        parts: list[str] = []
        while True:
            tok = self.tokens[j]
            if tok.kind == TOKEN_IDENT:
                parts.append(tok.value.lower())
            elif tok.kind == TOKEN_QUOTED_IDENT:
                parts.append(tok.value)
            else:
                return None
            j += 1
            if not self.tokens[j].is_op("."):
                return None
            j += 1
            if self.tokens[j].is_op("*"):
                self.pos = j + 1
                return ".".join(parts)

    def _is_alias_candidate(self) -> bool:
        tok = self.peek()
        if tok.kind == TOKEN_QUOTED_IDENT:
            return True
        return tok.kind == TOKEN_IDENT and tok.value.upper() not in _NON_ALIAS

    def _finish_items(self, raw_items: list[tuple]) -> list[ProjectionItem]:
        items: list[ProjectionItem] = []
        for index, raw in enumerate(raw_items):
            if raw[0] == "star":
                items.append(ProjectionItem(None, None, True, raw[1]))
                continue
            _, expr, alias = raw
            if alias is not None:
                name = alias
            elif isinstance(expr, ColumnRefExpr):
                name = expr.column
            else:
                name = f"expr_{index}"
            items.append(ProjectionItem(expr, name))
        return items

    # -- FROM ---------------------------------------------------------

    def _parse_from_clause(self) -> QueryNode:
        node = self._parse_from_item()
        while True:
            if self.match_op(","):
                node = Join("cross", None, node, self._parse_from_item())
                continue
            if self.check_kw("NATURAL"):
                raise UnsupportedStatement(
                    "NATURAL JOIN is not supported", self.peek().position
                )
            kind = self._match_join_kind()
            if kind is None:
                return node
            right = self._parse_from_item()
            condition = None
            if kind != "cross":
                if self.check_kw("USING"):
                    raise UnsupportedStatement(
                        "JOIN ... USING is not supported", self.peek().position
                    )
                self.expect_kw("ON")
                condition = self.parse_expr()
            node = Join(kind, condition, node, right)

    def _match_join_kind(self) -> str | None:
        if self.match_kw("JOIN"):
            return "inner"
        for word in ("INNER", "LEFT", "RIGHT", "FULL", "CROSS"):
            if self.check_kw(word):
                self.advance()
                if word in ("LEFT", "RIGHT", "FULL"):
                    self.match_kw("OUTER")
                self.expect_kw("JOIN")
                return word.lower()
        return None

    def _parse_from_item(self) -> QueryNode:
        if self.match_op("("):
            query = self.parse_query()
            self.expect_op(")")
            self.match_kw("AS")
            if not self._is_alias_candidate():
                tok = self.peek()
                raise ParseError("derived table requires an alias", tok.position)
            return DerivedTable(self.expect_ident(), query)
        name = self.parse_qualified_name()
        alias = None
        if self.match_kw("AS"):
            alias = self.expect_ident()
        elif self._is_alias_candidate():
            alias = self.expect_ident()
        return Scan(name, alias)

    # -- expressions ----------------------------------------------------

    def parse_expr(self) -> ExprNode:
        return self._parse_or()

    def _parse_or(self) -> ExprNode:
        node = self._parse_and()
        while self.match_kw("OR"):
            node = BinaryOp("or", node, self._parse_and())
        return node

    def _parse_and(self) -> ExprNode:
        node = self._parse_not()
        while self.match_kw("AND"):
            node = BinaryOp("and", node, self._parse_not())
        return node

    def _parse_not(self) -> ExprNode:
        if self.match_kw("NOT"):
            return FuncCall("not", (self._parse_not(),))
        return self._parse_predicate()

    def _parse_predicate(self) -> ExprNode:
        node = self._parse_additive()
        tok = self.peek()
        if tok.kind == TOKEN_OP and tok.value in _COMPARISONS:
            self.advance()
            op = "<>" if tok.value == "!=" else tok.value
            return BinaryOp(op, node, self._parse_additive())
        if self.match_kw("IS"):
            negated = self.match_kw("NOT")
            op = "is not" if negated else "is"
            if self.match_kw("NULL"):
                return BinaryOp(op, node, Literal(None))
            if self.match_kw("TRUE"):
                return BinaryOp(op, node, Literal(True))
            if self.match_kw("FALSE"):
                return BinaryOp(op, node, Literal(False))
            raise ParseError("expected NULL, TRUE or FALSE after IS", self.peek().position)
        negated = False
        if self.check_kw("NOT") and (
            self.peek(1).is_kw("LIKE") or self.peek(1).is_kw("IN") or self.peek(1).is_kw("BETWEEN")
        ):
            self.advance()
            negated = True
        if self.match_kw("LIKE"):
            result: ExprNode = BinaryOp("like", node, self._parse_additive())
            return FuncCall("not", (result,)) if negated else result
        if self.match_kw("IN"):
            return self._parse_in(node, negated)
        if self.match_kw("BETWEEN"):
            low = self._parse_additive()
            self.expect_kw("AND")
            high = self._parse_additive()
            result = BinaryOp("and", BinaryOp(">=", node, low), BinaryOp("<=", node, high))
            return FuncCall("not", (result,)) if negated else result
        return node

    def _parse_in(self, operand: ExprNode, negated: bool) -> ExprNode:
        self.expect_op("(")
        if self.check_kw("SELECT") or self.check_kw("WITH"):
            subquery = SubqueryExpr(self.parse_query())
            self.expect_op(")")
            result: ExprNode = BinaryOp("in", operand, subquery)
            return FuncCall("not", (result,)) if negated else result
        values = [self._parse_additive()]
        while self.match_op(","):
            values.append(self._parse_additive())
        self.expect_op(")")
        if negated:
            # x NOT IN (a, b) desugars to x <> a AND x <> b
            result = BinaryOp("<>", operand, values[0])
            for value in values[1:]:
                result = BinaryOp("and", result, BinaryOp("<>", operand, value))
            return result
        result = BinaryOp("=", operand, values[0])
        for value in values[1:]:
            result = BinaryOp("or", result, BinaryOp("=", operand, value))
        return result

    def _parse_additive(self) -> ExprNode:
        node = self._parse_multiplicative()
        while True:
            tok = self.peek()
            if tok.kind == TOKEN_OP and tok.value in ("+", "-", "||"):
                self.advance()
                node = BinaryOp(tok.value, node, self._parse_multiplicative())
            else:
                return node

    def _parse_multiplicative(self) -> ExprNode:
        node = self._parse_unary()
        while True:
            tok = self.peek()
            if tok.kind == TOKEN_OP and tok.value in ("*", "/", "%"):
                self.advance()
                node = BinaryOp(tok.value, node, self._parse_unary())
            else:
                return node

    def _parse_unary(self) -> ExprNode:
        if self.match_op("-"):
            operand = self._parse_unary()
            if isinstance(operand, Literal) and isinstance(operand.value, (int, float)):
                return Literal(-operand.value)
            return BinaryOp("-", Literal(0), operand)
        if self.match_op("+"):
            return self._parse_unary()
        return self._parse_primary()

    def _parse_primary(self) -> ExprNode:
        tok = self.peek()
        if tok.kind == TOKEN_NUMBER:
            self.advance()
            return Literal(float(tok.value) if "." in tok.value else int(tok.value))
        if tok.kind == TOKEN_STRING:
            self.advance()
            return Literal(tok.value)
        if tok.is_kw("NULL"):
            self.advance()
            return Literal(None)
        if tok.is_kw("TRUE"):
            self.advance()
            return Literal(True)
        if tok.is_kw("FALSE"):
            self.advance()
            return Literal(False)
        if tok.is_kw("CASE"):
            return self._parse_case()
        if tok.is_kw("CAST"):
            return self._parse_cast()
        if tok.is_kw("EXTRACT"):
            return self._parse_extract()
        if tok.is_kw("EXISTS"):
            self.advance()
            self.expect_op("(")
            subquery = SubqueryExpr(self.parse_query())
            self.expect_op(")")
            return FuncCall("exists", (subquery,))
        if tok.is_op("("):
            self.advance()
            if self.check_kw("SELECT") or self.check_kw("WITH"):
                subquery = SubqueryExpr(self.parse_query())
                self.expect_op(")")
                return subquery
            inner = self.parse_expr()
            self.expect_op(")")
            return inner
        if tok.kind == TOKEN_IDENT and tok.value.upper() in _NON_ALIAS:
            raise ParseError(f"unexpected keyword {tok.value!r}", tok.position)
        if tok.kind in (TOKEN_IDENT, TOKEN_QUOTED_IDENT):
            return self._parse_ref_or_call()
        raise ParseError(f"unexpected token {tok.value!r}", tok.position)

    def _parse_ref_or_call(self) -> ExprNode:
        parts = [self.expect_ident()]
        if self.check_op("(") and len(parts) == 1:
            return self._parse_call(parts[0])
        while self.check_op(".") and self._is_ident(1):
            self.advance()
            parts.append(self.expect_ident())
        if len(parts) == 1:
            return ColumnRefExpr(None, parts[0])
        return ColumnRefExpr(".".join(parts[:-1]), parts[-1])

    def _parse_call(self, name: str) -> ExprNode:
        self.expect_op("(")
        args: list[ExprNode] = []
        if self.match_op("*"):
            # count(*): no argument expressions
            self.expect_op(")")
        else:
            self.match_kw("DISTINCT")  # count(DISTINCT x): same lineage as count(x)
            if not self.check_op(")"):
                args.append(self.parse_expr())
                while self.match_op(","):
                    args.append(self.parse_expr())
            self.expect_op(")")
        if self.check_kw("OVER"):
            raise UnsupportedStatement(
                "window functions are not supported", self.peek().position
            )
        return FuncCall(name.lower(), tuple(args))

    def _parse_case(self) -> ExprNode:
        self.expect_kw("CASE")
        operand = None
        if not self.check_kw("WHEN"):
            operand = self.parse_expr()
        branches: list[tuple[ExprNode | None, ExprNode]] = []
        while self.match_kw("WHEN"):
            condition = self.parse_expr()
            if operand is not None:
                condition = BinaryOp("=", operand, condition)
            self.expect_kw("THEN")
            branches.append((condition, self.parse_expr()))
        if not branches:
            raise ParseError("CASE requires at least one WHEN", self.peek().position)
        if self.match_kw("ELSE"):
            branches.append((None, self.parse_expr()))
        self.expect_kw("END")
        return Case(tuple(branches))

    def _parse_cast(self) -> ExprNode:
        self.expect_kw("CAST")
        self.expect_op("(")
        operand = self.parse_expr()
        self.expect_kw("AS")
        words = [self.expect_ident()]
        while self._is_ident():
            words.append(self.expect_ident())
        type_name = " ".join(words)
        if self.match_op("("):
            numbers = []
            while self.peek().kind == TOKEN_NUMBER:
                numbers.append(self.advance().value)
                if not self.match_op(","):
                    break
            self.expect_op(")")
            type_name += "(" + ",".join(numbers) + ")"
        self.expect_op(")")
        return Cast(operand, type_name)

    def _parse_extract(self) -> ExprNode:
        self.expect_kw("EXTRACT")
        self.expect_op("(")
        field = self.expect_ident()
        self.expect_kw("FROM")
        operand = self.parse_expr()
        self.expect_op(")")
        return FuncCall("extract", (Literal(field), operand))


def _collect_aggregates(exprs: list[ExprNode]) -> list[FuncCall]:
    """Aggregate calls appearing in the given expressions, in source order.

    Does not descend into subqueries; those have their own grouping context.
    """
    found: list[FuncCall] = []

    def visit(expr: ExprNode) -> None:
        if isinstance(expr, FuncCall):
            if expr.name in _AGGREGATE_NAMES:
                found.append(expr)
            for arg in expr.args:
                visit(arg)
        elif isinstance(expr, BinaryOp):
            visit(expr.left)
            visit(expr.right)
        elif isinstance(expr, Case):
            for condition, result in expr.branches:
                if condition is not None:
                    visit(condition)
                visit(result)
        elif isinstance(expr, Cast):
            visit(expr.operand)

    for expr in exprs:
        visit(expr)
    return found
