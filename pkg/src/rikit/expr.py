"""Recursive-descent parser for one-variable function expressions.

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := atom ('^' atom)?
    atom   := number | 't' | func '(' expr (',' expr)? ')' | '(' expr ')'
    func   := 'log' | 'min' | 'max'

``log`` is the natural logarithm; ``log(1 + x)`` and ``log(x + 1)`` are
evaluated with log1p.
"""
import re
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, UnknownIdentifier

FUNCS = {"log": 1, "min": 2, "max": 2}

_TOKEN = re.compile(r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
                    r"|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


def _tokenize(src):
    pos, out = 0, []
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if not m:
            bad = len(src[pos:]) - len(src[pos:].lstrip()) + pos
            raise ParseError(f"unexpected character {src[bad]!r}", bad)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", len(src)))
    return out


class _Parser:
    def __init__(self, src):
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, val, pos = self.take()
        if val != text or kind != "op":
            found = "end of input" if kind == "end" else repr(val)
            raise ParseError(f"expected {text!r}, found {found}", pos)

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        node = self.atom()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            node = BinOp("^", node, self.atom())
        return node

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            if val == "t":
                return Var()
            if val not in FUNCS:
                raise UnknownIdentifier(f"unknown identifier {val!r}", pos)
            self.expect("(")
            args = [self.expr()]
            if self.peek()[1] == ",":
                self.take()
                args.append(self.expr())
            self.expect(")")
            if len(args) != FUNCS[val]:
                raise ParseError(f"{val} takes {FUNCS[val]} argument(s), got {len(args)}", pos)
            return Call(val, tuple(args))
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"unexpected {found}", pos)


def parse(src):
    """Source text to AST."""
    if not src or not src.strip():
        raise ParseError("empty expression", 0)
    p = _Parser(src)
    node = p.expr()
    kind, val, pos = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected {val!r}", pos)
    return node


def to_source(node):
    """Fully parenthesised text that parses back to the same AST."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return "t"
    if isinstance(node, BinOp):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    return f"{node.name}({', '.join(to_source(a) for a in node.args)})"


def _is_one(node):
    return isinstance(node, Num) and node.value == 1.0


def evaluate(node, t):
    if isinstance(node, Num):
        return np.full(np.shape(t), node.value) if np.ndim(t) else node.value
    if isinstance(node, Var):
        return t
    if isinstance(node, BinOp):
        a, b = evaluate(node.left, t), evaluate(node.right, t)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return a / b
        return np.power(a, b)
    args = node.args
    if node.name == "log":
        inner = args[0]
        if isinstance(inner, BinOp) and inner.op == "+":
            if _is_one(inner.left):
                return np.log1p(evaluate(inner.right, t))
            if _is_one(inner.right):
                return np.log1p(evaluate(inner.left, t))
        return np.log(evaluate(inner, t))
    a, b = evaluate(args[0], t), evaluate(args[1], t)
    return np.minimum(a, b) if node.name == "min" else np.maximum(a, b)


class FnExpr:
    """Parsed expression, callable on numpy arrays."""

    def __init__(self, src):
        self.source = src
        self.ast = parse(src)
        self.__name__ = src

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return np.asarray(evaluate(self.ast, t), dtype=float)

    def pretty(self):
        return to_source(self.ast)

    def __repr__(self):
        return f"FnExpr({self.source!r})"


def parse_function(src):
    return FnExpr(src)
