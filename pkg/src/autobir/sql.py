"""Tokenizer and recursive-descent parser for the supported SQL subset.

The grammar is deliberately closed: SELECT with JOIN/ON, WHERE, GROUP BY,
ORDER BY, the five aggregate functions, LIKE / IN / BETWEEN / IS NULL
predicates, arithmetic, aliases, and LIMIT/OFFSET. Anything outside the
subset is a syntax error that names the offending token position, which is
what the downstream repair loop feeds back to the model.

Double-quoted tokens are treated as string literals (models emit them for
values like "Euro"); quoted identifiers are not part of the subset.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union


class SqlSyntaxError(Exception):
    """Lex or parse failure with a 1-based source position."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{message} at line {line}, column {column}")
        self.message = message
        self.line = line
        self.column = column


# --- lexer -------------------------------------------------------------------

KEYWORDS = {
    "SELECT", "DISTINCT", "FROM", "JOIN", "INNER", "LEFT", "OUTER", "ON",
    "WHERE", "GROUP", "ORDER", "BY", "AS", "AND", "OR", "NOT", "LIKE",
    "IN", "IS", "NULL", "BETWEEN", "ASC", "DESC", "LIMIT", "OFFSET",
}

AGGREGATES = {"SUM", "AVG", "COUNT", "MIN", "MAX"}

_TWO_CHAR_OPS = {"!=", "<>", "<=", ">="}
_ONE_CHAR_OPS = {"=", "<", ">", "+", "-", "*", "/", "%"}
_PUNCT = {"(", ")", ",", ".", ";"}


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT | NUMBER | STRING | OP | PUNCT | EOF
    value: str
    line: int
    column: int

    @property
    def upper(self) -> str:
        return self.value.upper()


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into tokens, tracking 1-based line/column positions."""
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("--", i):
            j = text.find("\n", i)
            if j < 0:
                break
            col += j - i
            i = j
            continue
        start_line, start_col = line, col
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("IDENT", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                if text[j] == ".":
                    # a dot not followed by a digit terminates the number
                    if j + 1 >= n or not text[j + 1].isdigit():
                        break
                    seen_dot = True
                j += 1
            tokens.append(Token("NUMBER", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch in ("'", '"'):
            quote = ch
            j = i + 1
            buf = []
            while True:
                if j >= n:
                    raise SqlSyntaxError("unterminated string literal", start_line, start_col)
                if text[j] == quote:
                    if j + 1 < n and text[j + 1] == quote:  # doubled-quote escape
                        buf.append(quote)
                        j += 2
                        continue
                    j += 1
                    break
                if text[j] == "\n":
                    raise SqlSyntaxError("unterminated string literal", start_line, start_col)
                buf.append(text[j])
                j += 1
            tokens.append(Token("STRING", "".join(buf), start_line, start_col))
            col += j - i
            i = j
            continue
        two = text[i:i + 2]
        if two in _TWO_CHAR_OPS:
            tokens.append(Token("OP", two, start_line, start_col))
            i += 2
            col += 2
            continue
        if ch in _ONE_CHAR_OPS:
            tokens.append(Token("OP", ch, start_line, start_col))
            i += 1
            col += 1
            continue
        if ch in _PUNCT:
            tokens.append(Token("PUNCT", ch, start_line, start_col))
            i += 1
            col += 1
            continue
        raise SqlSyntaxError(f"unexpected character {ch!r}", start_line, start_col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


# --- AST ----------------------------------------------------------------------


@dataclass(frozen=True)
class Literal:
    value: Union[int, float, str, None]
    type_name: str  # "number" | "string" | "null"
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class ColumnRef:
    table: Optional[str]
    column: str
    line: int = 0
    column_pos: int = 0


@dataclass(frozen=True)
class Star:
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class FuncCall:
    name: str  # upper-cased aggregate name
    arg: object  # expression or Star
    distinct: bool = False
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class Unary:
    op: str
    operand: object


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Compare:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Like:
    expr: object
    pattern: object
    negated: bool = False


@dataclass(frozen=True)
class InList:
    expr: object
    items: tuple
    negated: bool = False


@dataclass(frozen=True)
class IsNull:
    expr: object
    negated: bool = False


@dataclass(frozen=True)
class Between:
    expr: object
    low: object
    high: object
    negated: bool = False


@dataclass(frozen=True)
class SelectItem:
    expr: object  # expression or Star
    alias: Optional[str] = None


@dataclass(frozen=True)
class TableRef:
    name: str
    alias: Optional[str] = None
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class Join:
    kind: str  # "INNER" | "LEFT"
    table: TableRef
    on: object


@dataclass(frozen=True)
class OrderItem:
    expr: object
    direction: str = "ASC"


@dataclass(frozen=True)
class Select:
    items: tuple[SelectItem, ...]
    from_table: TableRef
    joins: tuple[Join, ...] = ()
    where: Optional[object] = None
    group_by: tuple = ()
    order_by: tuple[OrderItem, ...] = ()
    limit: Optional[int] = None
    offset: Optional[int] = None
    distinct: bool = False


# --- parser -------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[Token]) -> None:
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def at_keyword(self, *words: str) -> bool:
        tok = self.peek()
        return tok.kind == "IDENT" and tok.upper in words

    def expect_keyword(self, word: str) -> Token:
        tok = self.peek()
        if tok.kind == "IDENT" and tok.upper == word:
            return self.advance()
        raise self._unexpected(tok, f"expected {word}")

    def expect_punct(self, value: str) -> Token:
        tok = self.peek()
        if tok.kind == "PUNCT" and tok.value == value:
            return self.advance()
        raise self._unexpected(tok, f"expected '{value}'")

    def _unexpected(self, tok: Token, hint: str) -> SqlSyntaxError:
        shown = tok.value if tok.kind != "EOF" else "end of input"
        return SqlSyntaxError(f"unexpected token '{shown}', {hint}", tok.line, tok.column)

    # entry ------------------------------------------------------------------

    def parse_statement(self) -> Select:
        stmt = self.parse_select()
        if self.peek().kind == "PUNCT" and self.peek().value == ";":
            self.advance()
        tok = self.peek()
        if tok.kind != "EOF":
            raise self._unexpected(tok, "expected end of statement")
        return stmt

    def parse_select(self) -> Select:
        self.expect_keyword("SELECT")
        distinct = False
        if self.at_keyword("DISTINCT"):
            self.advance()
            distinct = True
        items = [self.parse_select_item()]
        while self.peek().value == ",":
            self.advance()
            items.append(self.parse_select_item())
        self.expect_keyword("FROM")
        from_table = self.parse_table_ref()
        joins: list[Join] = []
        while self.at_keyword("JOIN", "INNER", "LEFT"):
            joins.append(self.parse_join())
        where = None
        if self.at_keyword("WHERE"):
            self.advance()
            where = self.parse_expr()
        group_by: list = []
        if self.at_keyword("GROUP"):
            self.advance()
            self.expect_keyword("BY")
            group_by.append(self.parse_expr())
            while self.peek().value == ",":
                self.advance()
                group_by.append(self.parse_expr())
        order_by: list[OrderItem] = []
        if self.at_keyword("ORDER"):
            self.advance()
            self.expect_keyword("BY")
            order_by.append(self.parse_order_item())
            while self.peek().value == ",":
                self.advance()
                order_by.append(self.parse_order_item())
        limit = offset = None
        if self.at_keyword("LIMIT"):
            self.advance()
            limit = self._expect_int()
            if self.at_keyword("OFFSET"):
                self.advance()
                offset = self._expect_int()
        return Select(
            items=tuple(items),
            from_table=from_table,
            joins=tuple(joins),
            where=where,
            group_by=tuple(group_by),
            order_by=tuple(order_by),
            limit=limit,
            offset=offset,
            distinct=distinct,
        )

    def _expect_int(self) -> int:
        tok = self.peek()
        if tok.kind != "NUMBER" or "." in tok.value:
            raise self._unexpected(tok, "expected an integer")
        self.advance()
        return int(tok.value)

    def parse_select_item(self) -> SelectItem:
        tok = self.peek()
        if tok.kind == "OP" and tok.value == "*":
            self.advance()
            return SelectItem(Star(tok.line, tok.column))
        expr = self.parse_expr()
        alias = None
        if self.at_keyword("AS"):
            self.advance()
            alias = self._expect_name()
        elif self._at_bare_alias():
            alias = self._expect_name()
        return SelectItem(expr, alias)

    def _at_bare_alias(self) -> bool:
        tok = self.peek()
        return tok.kind == "IDENT" and tok.upper not in KEYWORDS

    def _expect_name(self) -> str:
        tok = self.peek()
        if tok.kind != "IDENT" or tok.upper in KEYWORDS:
            raise self._unexpected(tok, "expected a name")
        self.advance()
        return tok.value

    def parse_table_ref(self) -> TableRef:
        tok = self.peek()
        name = self._expect_name()
        alias = None
        if self.at_keyword("AS"):
            self.advance()
            alias = self._expect_name()
        elif self._at_bare_alias():
            alias = self._expect_name()
        return TableRef(name, alias, tok.line, tok.column)

    def parse_join(self) -> Join:
        kind = "INNER"
        if self.at_keyword("INNER"):
            self.advance()
        elif self.at_keyword("LEFT"):
            self.advance()
            kind = "LEFT"
            if self.at_keyword("OUTER"):
                self.advance()
        self.expect_keyword("JOIN")
        table = self.parse_table_ref()
        self.expect_keyword("ON")
        on = self.parse_expr()
        return Join(kind, table, on)

    def parse_order_item(self) -> OrderItem:
        expr = self.parse_expr()
        direction = "ASC"
        if self.at_keyword("ASC", "DESC"):
            direction = self.advance().upper
        return OrderItem(expr, direction)

    # expressions --------------------------------------------------------------

    def parse_expr(self):
        return self.parse_or()

    def parse_or(self):
        left = self.parse_and()
        while self.at_keyword("OR"):
            self.advance()
            left = Binary("OR", left, self.parse_and())
        return left

    def parse_and(self):
        left = self.parse_not()
        while self.at_keyword("AND"):
            self.advance()
            left = Binary("AND", left, self.parse_not())
        return left

    def parse_not(self):
        if self.at_keyword("NOT"):
            self.advance()
            return Unary("NOT", self.parse_not())
        return self.parse_predicate()

    def parse_predicate(self):
        left = self.parse_additive()
        tok = self.peek()
        if tok.kind == "OP" and tok.value in ("=", "!=", "<>", "<", "<=", ">", ">="):
            self.advance()
            return Compare(tok.value, left, self.parse_additive())
        negated = False
        if self.at_keyword("NOT") and self.peek(1).upper in ("LIKE", "IN", "BETWEEN"):
            self.advance()
            negated = True
        if self.at_keyword("LIKE"):
            self.advance()
            return Like(left, self.parse_additive(), negated)
        if self.at_keyword("IN"):
            self.advance()
            self.expect_punct("(")
            items = [self.parse_expr()]
            while self.peek().value == ",":
                self.advance()
                items.append(self.parse_expr())
            self.expect_punct(")")
            return InList(left, tuple(items), negated)
        if self.at_keyword("BETWEEN"):
            self.advance()
            low = self.parse_additive()
            self.expect_keyword("AND")
            return Between(left, low, self.parse_additive(), negated)
        if self.at_keyword("IS"):
            self.advance()
            neg = False
            if self.at_keyword("NOT"):
                self.advance()
                neg = True
            self.expect_keyword("NULL")
            return IsNull(left, neg)
        return left

    def parse_additive(self):
        left = self.parse_multiplicative()
        while self.peek().kind == "OP" and self.peek().value in ("+", "-"):
            op = self.advance().value
            left = Binary(op, left, self.parse_multiplicative())
        return left

    def parse_multiplicative(self):
        left = self.parse_unary()
        while self.peek().kind == "OP" and self.peek().value in ("*", "/", "%"):
            op = self.advance().value
            left = Binary(op, left, self.parse_unary())
        return left

    def parse_unary(self):
        tok = self.peek()
        if tok.kind == "OP" and tok.value in ("-", "+"):
            self.advance()
            return Unary(tok.value, self.parse_unary())
        return self.parse_primary()

    def parse_primary(self):
        tok = self.peek()
        if tok.kind == "NUMBER":
            self.advance()
            value: Union[int, float] = float(tok.value) if "." in tok.value else int(tok.value)
            return Literal(value, "number", tok.line, tok.column)
        if tok.kind == "STRING":
            self.advance()
            return Literal(tok.value, "string", tok.line, tok.column)
        if tok.kind == "PUNCT" and tok.value == "(":
            self.advance()
            inner = self.parse_expr()
            self.expect_punct(")")
            return inner
        if tok.kind == "IDENT":
            if tok.upper == "NULL":
                self.advance()
                return Literal(None, "null", tok.line, tok.column)
            if tok.upper in AGGREGATES and self.peek(1).value == "(":
                return self.parse_call()
            if tok.upper in KEYWORDS:
                raise self._unexpected(tok, "expected an expression")
            self.advance()
            if self.peek().value == "." :
                self.advance()
                col = self._expect_name()
                return ColumnRef(tok.value, col, tok.line, tok.column)
            if self.peek().value == "(":
                raise SqlSyntaxError(
                    f"unsupported function '{tok.value}', only "
                    "SUM, AVG, COUNT, MIN, MAX are available",
                    tok.line, tok.column,
                )
            return ColumnRef(None, tok.value, tok.line, tok.column)
        raise self._unexpected(tok, "expected an expression")

    def parse_call(self) -> FuncCall:
        name_tok = self.advance()
        self.expect_punct("(")
        distinct = False
        if self.at_keyword("DISTINCT"):
            self.advance()
            distinct = True
        tok = self.peek()
        if tok.kind == "OP" and tok.value == "*":
            self.advance()
            arg: object = Star(tok.line, tok.column)
        else:
            arg = self.parse_expr()
        self.expect_punct(")")
        return FuncCall(name_tok.upper, arg, distinct, name_tok.line, name_tok.column)


def parse_select(text: str) -> Select:
    """Parse ``text`` as a single SELECT statement or raise SqlSyntaxError."""
    tokens = tokenize(text)
    if tokens[0].kind == "EOF":
        raise SqlSyntaxError("empty statement", 1, 1)
    return _Parser(tokens).parse_statement()


def statement_keyword(text: str) -> str:
    """Upper-cased first keyword of ``text``; empty string for blank input."""
    try:
        tokens = tokenize(text)
    except SqlSyntaxError:
        stripped = text.lstrip()
        word = stripped.split(None, 1)[0] if stripped else ""
        return word.upper()
    return tokens[0].upper if tokens[0].kind == "IDENT" else ""


def is_single_select(text: str) -> bool:
    """Cheap AST-level read-only test used by the execution guard."""
    if statement_keyword(text) != "SELECT":
        return False
    try:
        parse_select(text)
    except SqlSyntaxError:
        return False
    return True


def walk(node: object) -> Iterator[object]:
    """Yield ``node`` and every sub-expression in source order."""
    yield node
    if isinstance(node, (Unary,)):
        yield from walk(node.operand)
    elif isinstance(node, (Binary, Compare)):
        yield from walk(node.left)
        yield from walk(node.right)
    elif isinstance(node, Like):
        yield from walk(node.expr)
        yield from walk(node.pattern)
    elif isinstance(node, InList):
        yield from walk(node.expr)
        for item in node.items:
            yield from walk(item)
    elif isinstance(node, IsNull):
        yield from walk(node.expr)
    elif isinstance(node, Between):
        yield from walk(node.expr)
        yield from walk(node.low)
        yield from walk(node.high)
    elif isinstance(node, FuncCall):
        yield from walk(node.arg)
    elif isinstance(node, Select):
        for item in node.items:
            yield from walk(item.expr)
        for join in node.joins:
            yield from walk(join.on)
        if node.where is not None:
            yield from walk(node.where)
        for expr in node.group_by:
            yield from walk(expr)
        for order in node.order_by:
            yield from walk(order.expr)
