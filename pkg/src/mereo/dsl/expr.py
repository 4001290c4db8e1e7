"""Quantifier-free constraint expressions over label fields.

Grammar, loosest binding first::

    expr     := or_expr ('implies' expr)?
    or_expr  := and_expr ('or' and_expr)*
    and_expr := not_expr ('and' not_expr)*
    not_expr := 'not' not_expr | compare
    compare  := arith (('<' | '<=' | '=' | '!=' | '>=' | '>') arith)?
    arith    := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | atom
    atom     := NUMBER | STRING | 'true' | 'false' | NAME | '(' expr ')'

``==``, ``&&``, ``||``, ``!``, ``->``/``=>`` and the unicode forms
``≤ ≥ ≠ ∧ ∨ ¬ ⇒`` are accepted as spellings of the same operators.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass, field
from typing import Any, Mapping, Union

import numpy as np

from ..core import MereologyError, Part, System, is_subpart, part_from_assignment
from ..logic import Constraint

__all__ = [
    "DslError",
    "ExprSyntaxError",
    "ExprTypeError",
    "FieldError",
    "Num",
    "Str",
    "Bool",
    "Field",
    "Neg",
    "Arith",
    "Compare",
    "Not",
    "Logic",
    "Expr",
    "parse_expr",
    "format_expr",
    "fields_of",
    "evaluate",
    "evaluate_on_behaviors",
    "parse_constraint",
]

# Limits keep the recursive parser, printer and evaluator well inside the
# interpreter's stack.
MAX_DEPTH = 60
MAX_TREE_DEPTH = 200


class DslError(MereologyError):
    """An error tied to a position in some source text (1-based line/column)."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class ExprSyntaxError(DslError):
    pass


class ExprTypeError(DslError):
    pass


class FieldError(DslError):
    pass


# -- AST -----------------------------------------------------------------------
# ``pos`` is the 0-based source offset, excluded from equality.


@dataclass(frozen=True)
class Num:
    value: Union[int, float]
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Str:
    value: str
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Bool:
    value: bool
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Field:
    name: str
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Arith:
    op: str  # + - * /
    left: "Expr"
    right: "Expr"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Compare:
    op: str  # < <= = != >= >
    left: "Expr"
    right: "Expr"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Not:
    operand: "Expr"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Logic:
    op: str  # and or implies
    left: "Expr"
    right: "Expr"
    pos: int = field(default=0, compare=False)


Expr = Union[Num, Str, Bool, Field, Neg, Arith, Compare, Not, Logic]


# -- lexer ---------------------------------------------------------------------

_SYMBOLS = {
    "<=": "<=", ">=": ">=", "!=": "!=", "==": "=", "&&": "and", "||": "or",
    "->": "implies", "=>": "implies",
    "<": "<", ">": ">", "=": "=", "+": "+", "-": "-", "*": "*", "/": "/",
    "(": "(", ")": ")", "!": "not",
    "≤": "<=", "≥": ">=", "≠": "!=", "∧": "and", "∨": "or", "¬": "not", "⇒": "implies",
    "·": "*", "−": "-",
}
_DIGITS = frozenset("0123456789")
_KEYWORDS = {"and", "or", "not", "implies", "true", "false"}


@dataclass
class _Tok:
    kind: str  # num str name op end
    value: Any
    pos: int


def _line_col(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def _error(cls, text: str, pos: int, message: str) -> DslError:
    line, col = _line_col(text, pos)
    return cls(message, line, col)


def _lex(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _DIGITS or (c == "." and i + 1 < n and text[i + 1] in _DIGITS):
            j = i
            while j < n and text[j] in _DIGITS:
                j += 1
            is_float = False
            if j < n and text[j] == ".":
                is_float = True
                j += 1
                while j < n and text[j] in _DIGITS:
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k] in _DIGITS:
                    is_float = True
                    j = k
                    while j < n and text[j] in _DIGITS:
                        j += 1
            lexeme = text[i:j]
            if j < n and (text[j].isalnum() or text[j] == "_"):
                raise _error(ExprSyntaxError, text, i, f"malformed number {text[i:j + 1]!r}")
            value = float(lexeme) if is_float else int(lexeme)
            if isinstance(value, float) and not math.isfinite(value):
                raise _error(ExprSyntaxError, text, i, f"number {lexeme!r} out of range")
            toks.append(_Tok("num", value, i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word in _KEYWORDS:
                toks.append(_Tok("op", word, i))
            else:
                toks.append(_Tok("name", word, i))
            i = j
            continue
        if c in "\"'":
            j = i + 1
            buf = []
            while j < n and text[j] != c:
                if text[j] == "\\" and j + 1 < n:
                    j += 1
                if text[j] == "\n":
                    break
                buf.append(text[j])
                j += 1
            if j >= n or text[j] != c:
                raise _error(ExprSyntaxError, text, i, "unterminated string")
            toks.append(_Tok("str", "".join(buf), i))
            i = j + 1
            continue
        two = text[i:i + 2]
        if two in _SYMBOLS:
            toks.append(_Tok("op", _SYMBOLS[two], i))
            i += 2
            continue
        if c in _SYMBOLS:
            toks.append(_Tok("op", _SYMBOLS[c], i))
            i += 1
            continue
        raise _error(ExprSyntaxError, text, i, f"unexpected character {c!r}")
    toks.append(_Tok("end", None, n))
    return toks


# -- parser --------------------------------------------------------------------

_COMPARE_OPS = {"<", "<=", "=", "!=", ">=", ">"}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _lex(text)
        self.i = 0
        self.depth = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def at(self, *values: str) -> bool:
        return self.tok.kind == "op" and self.tok.value in values

    def advance(self) -> _Tok:
        t = self.tok
        self.i += 1
        return t

    def fail(self, message: str, tok: _Tok | None = None) -> DslError:
        tok = tok or self.tok
        return _error(ExprSyntaxError, self.text, tok.pos, message)

    def _describe(self, tok: _Tok) -> str:
        return "end of input" if tok.kind == "end" else repr(tok.value)

    def enter(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise self.fail("expression nested too deeply")

    def parse(self) -> Expr:
        if self.tok.kind == "end":
            raise self.fail("empty expression")
        e = self.expr()
        if self.tok.kind != "end":
            raise self.fail(f"unexpected {self._describe(self.tok)}")
        deepest = _deepest(e)
        if deepest is not None:
            raise _error(ExprSyntaxError, self.text, deepest.pos, "expression nested too deeply")
        return e

    def expr(self) -> Expr:
        self.enter()
        left = self.or_expr()
        if self.at("implies"):
            t = self.advance()
            left = Logic("implies", left, self.expr(), t.pos)
        self.depth -= 1
        return left

    def or_expr(self) -> Expr:
        left = self.and_expr()
        while self.at("or"):
            t = self.advance()
            left = Logic("or", left, self.and_expr(), t.pos)
        return left

    def and_expr(self) -> Expr:
        left = self.not_expr()
        while self.at("and"):
            t = self.advance()
            left = Logic("and", left, self.not_expr(), t.pos)
        return left

    def not_expr(self) -> Expr:
        if self.at("not"):
            t = self.advance()
            self.enter()
            operand = self.not_expr()
            self.depth -= 1
            return Not(operand, t.pos)
        return self.compare()

    def compare(self) -> Expr:
        left = self.arith()
        if self.tok.kind == "op" and self.tok.value in _COMPARE_OPS:
            t = self.advance()
            right = self.arith()
            if self.tok.kind == "op" and self.tok.value in _COMPARE_OPS:
                raise self.fail("chained comparison; combine with 'and'")
            return Compare(t.value, left, right, t.pos)
        return left

    def arith(self) -> Expr:
        left = self.term()
        while self.at("+", "-"):
            t = self.advance()
            left = Arith(t.value, left, self.term(), t.pos)
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.at("*", "/"):
            t = self.advance()
            left = Arith(t.value, left, self.unary(), t.pos)
        return left

    def unary(self) -> Expr:
        if self.at("-"):
            t = self.advance()
            self.enter()
            operand = self.unary()
            self.depth -= 1
            return Neg(operand, t.pos)
        return self.atom()

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(t.value, t.pos)
        if t.kind == "str":
            self.advance()
            return Str(t.value, t.pos)
        if t.kind == "name":
            self.advance()
            return Field(t.value, t.pos)
        if self.at("true", "false"):
            self.advance()
            return Bool(t.value == "true", t.pos)
        if self.at("("):
            self.advance()
            e = self.expr()
            if not self.at(")"):
                raise self.fail(f"expected ')' to close '(' at column {_line_col(self.text, t.pos)[1]}")
            self.advance()
            return e
        if t.kind == "end":
            raise self.fail("unexpected end of input")
        raise self.fail(f"unexpected {self._describe(t)}")


def _deepest(e: Expr) -> Expr | None:
    """First node below ``MAX_TREE_DEPTH``, found without recursion."""
    stack = [(e, 1)]
    while stack:
        node, d = stack.pop()
        if d > MAX_TREE_DEPTH:
            return node
        for attr in ("operand", "left", "right"):
            child = getattr(node, attr, None)
            if child is not None:
                stack.append((child, d + 1))
    return None


def parse_expr(text: str) -> Expr:
    return _Parser(text).parse()


# -- printer -------------------------------------------------------------------

_PREC = {"implies": 1, "or": 2, "and": 3, "not": 4, "cmp": 5, "+": 6, "-": 6, "*": 7, "/": 7, "neg": 8}


def _prec(e: Expr) -> int:
    if isinstance(e, Logic):
        return _PREC[e.op]
    if isinstance(e, Not):
        return _PREC["not"]
    if isinstance(e, Compare):
        return _PREC["cmp"]
    if isinstance(e, Arith):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _PREC["neg"]
    return 9


def _fmt(e: Expr, min_prec: int) -> str:
    s = _fmt_bare(e)
    return f"({s})" if _prec(e) < min_prec else s


def _fmt_bare(e: Expr) -> str:
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Str):
        return '"' + e.value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(e, Bool):
        return "true" if e.value else "false"
    if isinstance(e, Field):
        return e.name
    if isinstance(e, Neg):
        inner = _fmt(e.operand, 8)
        return f"- {inner}" if inner.startswith("-") else f"-{inner}"
    if isinstance(e, Not):
        return f"not {_fmt(e.operand, 4)}"
    if isinstance(e, Compare):
        return f"{_fmt(e.left, 6)} {e.op} {_fmt(e.right, 6)}"
    if isinstance(e, Arith):
        p = _PREC[e.op]
        return f"{_fmt(e.left, p)} {e.op} {_fmt(e.right, p + 1)}"
    if isinstance(e, Logic):
        p = _PREC[e.op]
        if e.op == "implies":
            return f"{_fmt(e.left, p + 1)} implies {_fmt(e.right, p)}"
        return f"{_fmt(e.left, p)} {e.op} {_fmt(e.right, p + 1)}"
    raise TypeError(f"not an expression node: {e!r}")


def format_expr(e: Expr) -> str:
    """Render with the fewest parentheses that reparse to the same tree."""
    return _fmt(e, 0)


def fields_of(e: Expr) -> list[Field]:
    out: list[Field] = []
    stack = [e]
    while stack:
        x = stack.pop()
        if isinstance(x, Field):
            out.append(x)
        elif isinstance(x, (Neg, Not)):
            stack.append(x.operand)
        elif isinstance(x, (Arith, Compare, Logic)):
            stack.extend([x.right, x.left])
    return out


# -- evaluation ----------------------------------------------------------------


def _kind(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "bool"
    if isinstance(v, (int, float, np.integer, np.floating)):
        return "number"
    if isinstance(v, str):
        return "string"
    return type(v).__name__


def _eval(e: Expr, env: Mapping[str, Any], text: str) -> Any:
    def err(node, message):
        return _error(ExprTypeError, text, node.pos, message)

    if isinstance(e, (Num, Str, Bool)):
        return e.value
    if isinstance(e, Field):
        try:
            return env[e.name]
        except KeyError:
            raise _error(FieldError, text, e.pos, f"unknown field {e.name!r}") from None
    if isinstance(e, Neg):
        v = _eval(e.operand, env, text)
        if _kind(v) != "number":
            raise err(e, f"cannot negate a {_kind(v)}")
        return -v
    if isinstance(e, Not):
        v = _eval(e.operand, env, text)
        if _kind(v) != "bool":
            raise err(e, f"'not' needs a bool, got a {_kind(v)}")
        return not v
    if isinstance(e, Logic):
        a = _eval(e.left, env, text)
        b = _eval(e.right, env, text)
        if _kind(a) != "bool" or _kind(b) != "bool":
            raise err(e, f"'{e.op}' needs bools, got {_kind(a)} and {_kind(b)}")
        if e.op == "and":
            return bool(a and b)
        if e.op == "or":
            return bool(a or b)
        return bool((not a) or b)
    if isinstance(e, Arith):
        a = _eval(e.left, env, text)
        b = _eval(e.right, env, text)
        if _kind(a) != "number" or _kind(b) != "number":
            raise err(e, f"'{e.op}' needs numbers, got {_kind(a)} and {_kind(b)}")
        if e.op == "/" and b == 0:
            raise err(e, "division by zero")
        try:
            if e.op == "+":
                return a + b
            if e.op == "-":
                return a - b
            if e.op == "*":
                return a * b
            return a / b
        except OverflowError:
            raise err(e, "numeric overflow") from None
    if isinstance(e, Compare):
        a = _eval(e.left, env, text)
        b = _eval(e.right, env, text)
        ka, kb = _kind(a), _kind(b)
        if ka != kb:
            raise err(e, f"cannot compare a {ka} with a {kb}")
        if e.op in ("=", "!="):
            return (a == b) == (e.op == "=")
        if ka != "number":
            raise err(e, f"'{e.op}' is only defined on numbers, got {ka}s")
        return bool(_ORDER[e.op](a, b))
    raise TypeError(f"not an expression node: {e!r}")


_ORDER = {"<": operator.lt, "<=": operator.le, ">=": operator.ge, ">": operator.gt}


def evaluate(expr: Expr | str, label: Mapping[str, Any], text: str = "") -> Any:
    """Evaluate ``expr`` with field names looked up in ``label``."""
    if isinstance(expr, str):
        text, expr = expr, parse_expr(expr)
    return _eval(expr, label, text)


def _resolve(name: str, schema: tuple[str, ...], bindings: Mapping[str, Any]) -> tuple[str, Any]:
    """Map an identifier to ``("field", name)`` or ``("literal", value)``.

    An identifier ``base_v`` where ``v`` is bound to an integer resolves to
    the field ``base_<value>``, so ``r_t`` with ``t=3`` reads ``r_3``.
    """
    if name in schema:
        return "field", name
    if name in bindings:
        return "literal", bindings[name]
    base, sep, var = name.rpartition("_")
    if sep and base and var in bindings:
        v = bindings[var]
        if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
            candidate = f"{base}_{int(v)}"
            if candidate in schema:
                return "field", candidate
    return "missing", None


def _environments(
    expr: Expr, text: str, system: System, bindings: Mapping[str, Any]
) -> tuple[dict[str, str], dict[str, Any]]:
    fields: dict[str, str] = {}
    literals: dict[str, Any] = {}
    for f in fields_of(expr):
        kind, value = _resolve(f.name, system.schema, bindings)
        if kind == "missing":
            raise _error(FieldError, text, f.pos, f"unknown field {f.name!r}")
        if kind == "field":
            fields[f.name] = value
        else:
            if _kind(value) not in ("number", "string", "bool"):
                raise _error(FieldError, text, f.pos, f"binding {f.name!r} is not a scalar")
            literals[f.name] = value
    return fields, literals


def evaluate_on_behaviors(
    text: str, system: System, bindings: Mapping[str, Any] | None = None
) -> np.ndarray:
    """Evaluate an expression on every behavior of ``system``."""
    expr = parse_expr(text)
    fields, literals = _environments(expr, text, system, bindings or {})
    out = np.zeros(system.size, dtype=bool)
    for s in range(system.size):
        label = system.label(s)
        env = {**literals, **{k: label[v] for k, v in fields.items()}}
        out[s] = _truth(_eval(expr, env, text), expr, text)
    return out


def _truth(v: Any, expr: Expr, text: str) -> bool:
    if _kind(v) != "bool":
        raise _error(ExprTypeError, text, 0, f"expression evaluates to a {_kind(v)}, not a bool")
    return bool(v)


def parse_constraint(
    text: str, part: Part, bindings: Mapping[str, Any] | None = None
) -> Constraint:
    """Compile ``text`` to a constraint on ``part``.

    Every referenced field must be constant on each block of ``part``; the
    expression is then evaluated on one representative per block.
    """
    expr = parse_expr(text)
    system = part.system
    fields, literals = _environments(expr, text, system, bindings or {})
    for f in fields_of(expr):
        if f.name not in fields:
            continue
        column = system.column(fields[f.name])
        ids: dict[Any, int] = {}
        kernel = part_from_assignment(
            system, f.name, [ids.setdefault(v, len(ids)) for v in column]
        )
        if not is_subpart(part, kernel):
            raise _error(
                FieldError,
                text,
                f.pos,
                f"field {f.name!r} is not constant on the blocks of part {part.name!r}",
            )
    bits = []
    for s in part.representatives():
        label = system.label(int(s))
        env = {**literals, **{k: label[v] for k, v in fields.items()}}
        bits.append(_truth(_eval(expr, env, text), expr, text))
    return Constraint(part, bits)
