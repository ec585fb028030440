"""A tiny arithmetic expression language for rate functions of one variable.

Expressions are written in ordinary infix notation over the single variable
``x``, e.g. ``"2 + 0.5*sin(x)"`` or ``"exp(-x^2/8)"``.  The grammar is

    expr   := term  (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | IDENT | IDENT "(" expr ("," expr)* ")" | "(" expr ")"

so ``^`` is right-associative and binds tighter than unary minus:
``-2^2`` is ``-(2^2) = -4`` and ``2^3^2`` is ``2^(3^2) = 512``.

The module exposes three layers: :func:`tokenize` (source text to tokens),
:func:`parse` (tokens to an immutable AST), and :func:`evaluate` (AST plus a
scalar or array ``x`` to values).  :func:`parse_text` is the obvious
composition.  Evaluation is vectorized over numpy arrays and raises
:class:`~ippp.errors.EvalError` with a source position as soon as any
intermediate result is non-finite, so a division by zero or ``log`` of a
negative number is reported where it happened rather than surfacing as a
``nan`` downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EvalError, LexError, ParseError, UnknownFunction, UnknownVariable

__all__ = [
    "Token",
    "Num",
    "Var",
    "Unary",
    "Binary",
    "Call",
    "RateExpr",
    "tokenize",
    "parse",
    "parse_text",
    "evaluate",
]

# Functions the language knows, with their arity.
FUNCTIONS = {
    "sin": 1,
    "cos": 1,
    "exp": 1,
    "log": 1,
    "sqrt": 1,
    "abs": 1,
    "min": 2,
    "max": 2,
}

CONSTANTS = {"pi": math.pi, "e": math.e}

_VARIABLE = "x"


@dataclass(frozen=True)
class Token:
    """One lexeme of source text.

    ``kind`` is one of ``"number"``, ``"identifier"``, ``"operator"``,
    ``"paren"``, ``"comma"``.  ``lexeme`` is the exact source slice, so
    joining lexemes (with the original whitespace dropped) reproduces the
    input, and ``position`` is the offset of its first character.
    """

    kind: str
    lexeme: str
    position: int


def _isdigit(ch: str) -> bool:
    return "0" <= ch <= "9"


def _isident(ch: str) -> bool:
    return ("a" <= ch <= "z") or ("A" <= ch <= "Z") or ch == "_"


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens.

    Numbers accept an optional fractional part and scientific notation
    (``1e-3``, ``2.5E+10``); a trailing ``e`` not followed by digits is left
    for the identifier rules, so ``2e`` lexes as ``2`` then ``e``.  The
    unicode minus sign U+2212 is accepted as an operator.  Any other
    unrecognized character raises :class:`LexError` with its position.
    """
    tokens: list[Token] = []
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if _isdigit(ch) or (ch == "." and i + 1 < n and _isdigit(source[i + 1])):
            j = i
            while j < n and _isdigit(source[j]):
                j += 1
            if j < n and source[j] == ".":
                j += 1
                while j < n and _isdigit(source[j]):
                    j += 1
            if j < n and source[j] in "eE":
                # Only take the exponent if digits actually follow it.
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and _isdigit(source[k]):
                    j = k + 1
                    while j < n and _isdigit(source[j]):
                        j += 1
            tokens.append(Token("number", source[i:j], i))
            i = j
            continue
        if _isident(ch):
            j = i
            while j < n and (_isident(source[j]) or _isdigit(source[j])):
                j += 1
            tokens.append(Token("identifier", source[i:j], i))
            i = j
            continue
        if ch in "+-*/^" or ch == "−":
            tokens.append(Token("operator", ch, i))
            i += 1
            continue
        if ch in "()":
            tokens.append(Token("paren", ch, i))
            i += 1
            continue
        if ch == ",":
            tokens.append(Token("comma", ch, i))
            i += 1
            continue
        raise LexError(i, f"unexpected character {ch!r}")
    return tokens


@dataclass(frozen=True)
class Num:
    value: float
    position: int


@dataclass(frozen=True)
class Var:
    position: int


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "RateExpr"
    position: int


@dataclass(frozen=True)
class Binary:
    op: str
    left: "RateExpr"
    right: "RateExpr"
    position: int


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple
    position: int


RateExpr = Num | Var | Unary | Binary | Call


def _op(token: Token) -> str:
    # Normalize the unicode minus to ASCII for the AST.
    return "-" if token.lexeme == "−" else token.lexeme


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def _end_position(self) -> int:
        if not self.tokens:
            return 0
        last = self.tokens[-1]
        return last.position + len(last.lexeme)

    def peek(self) -> Token | None:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos]
        return None

    def advance(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError(self._end_position(), "more input")
        self.pos += 1
        return tok

    def error(self, expected: str) -> ParseError:
        tok = self.peek()
        at = tok.position if tok is not None else self._end_position()
        return ParseError(at, expected)

    def expr(self) -> RateExpr:
        node = self.term()
        while True:
            tok = self.peek()
            if tok is not None and tok.kind == "operator" and _op(tok) in "+-":
                self.advance()
                node = Binary(_op(tok), node, self.term(), tok.position)
            else:
                return node

    def term(self) -> RateExpr:
        node = self.unary()
        while True:
            tok = self.peek()
            if tok is not None and tok.kind == "operator" and tok.lexeme in "*/":
                self.advance()
                node = Binary(tok.lexeme, node, self.unary(), tok.position)
            else:
                return node

    def unary(self) -> RateExpr:
        tok = self.peek()
        if tok is not None and tok.kind == "operator" and _op(tok) == "-":
            self.advance()
            return Unary("-", self.unary(), tok.position)
        return self.power()

    def power(self) -> RateExpr:
        base = self.atom()
        tok = self.peek()
        if tok is not None and tok.kind == "operator" and tok.lexeme == "^":
            self.advance()
            # Right-associative; the exponent may carry its own unary minus.
            return Binary("^", base, self.unary(), tok.position)
        return base

    def atom(self) -> RateExpr:
        tok = self.peek()
        if tok is None:
            raise self.error("a number, name or '('")
        if tok.kind == "number":
            self.advance()
            return Num(float(tok.lexeme), tok.position)
        if tok.kind == "identifier":
            self.advance()
            nxt = self.peek()
            if nxt is not None and nxt.kind == "paren" and nxt.lexeme == "(":
                return self.call(tok)
            if tok.lexeme == _VARIABLE:
                return Var(tok.position)
            if tok.lexeme in CONSTANTS:
                return Num(CONSTANTS[tok.lexeme], tok.position)
            raise UnknownVariable(tok.position, tok.lexeme)
        if tok.kind == "paren" and tok.lexeme == "(":
            self.advance()
            node = self.expr()
            closing = self.peek()
            if closing is None or closing.lexeme != ")":
                raise self.error("')'")
            self.advance()
            return node
        raise self.error("a number, name or '('")

    def call(self, name: Token) -> RateExpr:
        if name.lexeme not in FUNCTIONS:
            raise UnknownFunction(name.position, name.lexeme)
        arity = FUNCTIONS[name.lexeme]
        self.advance()  # consume "("
        args = [self.expr()]
        while True:
            tok = self.peek()
            if tok is not None and tok.kind == "comma":
                self.advance()
                args.append(self.expr())
                continue
            break
        closing = self.peek()
        if closing is None or closing.lexeme != ")":
            raise self.error("')' or ','")
        self.advance()
        if len(args) != arity:
            raise ParseError(
                name.position,
                f"{arity} argument{'s' if arity != 1 else ''} to {name.lexeme!r}, "
                f"got {len(args)}",
            )
        return Call(name.lexeme, tuple(args), name.position)


def parse(tokens: list[Token]) -> RateExpr:
    """Parse a token list into an AST, requiring all input to be consumed."""
    parser = _Parser(tokens)
    node = parser.expr()
    leftover = parser.peek()
    if leftover is not None:
        raise ParseError(leftover.position, "end of input")
    return node


def parse_text(source: str) -> RateExpr:
    """Tokenize and parse ``source`` in one step."""
    return parse(tokenize(source))


_BINARY_FNS = {
    "+": np.add,
    "-": np.subtract,
    "*": np.multiply,
    "/": np.divide,
    "^": np.power,
}

_CALL_FNS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "min": np.minimum,
    "max": np.maximum,
}


def _require_finite(values, node: RateExpr, what: str, x):
    if np.all(np.isfinite(values)):
        return values
    if np.ndim(values) == 0:
        where = float(x) if np.ndim(x) == 0 else None
    else:
        bad = int(np.argmin(np.isfinite(values)))
        where = float(np.asarray(x).flat[bad]) if np.ndim(x) > 0 else float(x)
    suffix = "" if where is None else f" at x={where!r}"
    raise EvalError(node.position, f"{what} produced a non-finite value{suffix}")


def _eval(node: RateExpr, x):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return x
    if isinstance(node, Unary):
        return np.negative(_eval(node.operand, x))
    if isinstance(node, Binary):
        left = _eval(node.left, x)
        right = _eval(node.right, x)
        out = _BINARY_FNS[node.op](left, right)
        return _require_finite(out, node, f"operator {node.op!r}", x)
    if isinstance(node, Call):
        args = [_eval(a, x) for a in node.args]
        out = _CALL_FNS[node.func](*args)
        return _require_finite(out, node, f"function {node.func!r}", x)
    raise TypeError(f"not a RateExpr node: {node!r}")


def evaluate(expr: RateExpr, x):
    """Evaluate ``expr`` at ``x``.

    ``x`` may be a float or a numpy array; the result has the same shape.
    A scalar input returns a plain float.  Non-finite intermediates raise
    :class:`EvalError` carrying the source position of the operator or
    function that produced them.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("x must be finite")
    with np.errstate(all="ignore"):
        out = _eval(expr, arr)
    if arr.ndim == 0:
        return float(out)
    out = np.asarray(out, dtype=float)
    if out.shape != arr.shape:
        # Constant sub-expressions collapse to scalars; broadcast back out.
        out = np.full(arr.shape, float(out))
    return out
