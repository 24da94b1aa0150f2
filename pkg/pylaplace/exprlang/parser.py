# Recursive descent parser of the expression language.
#
#   expr   := term (('+' | '-') term)*
#   term   := factor (('*' | '/') factor)*
#   factor := '-' factor | power
#   power  := atom ('^' factor)?
#   atom   := number | 'x' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
#   func   := 'exp' | 'log' | 'sqrt' | 'sin' | 'cos'
#
# '^' is right associative through `factor`, and unary minus binds looser than '^' (-x^2 = -(x^2))
# but tighter than binary '+'/'-'.

import math
import re
from typing import NamedTuple

from pylaplace.errors import ExpressionSyntaxError, UnknownIdentifier
from pylaplace.exprlang.nodes import UNARY_FUNCTIONS, Binary, Expr, Num, Unary, Var

CONSTANTS = {"pi": math.pi, "e": math.e}

_TOKEN = re.compile(
    r"(?P<space>\s+)"
    r"|(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
)
_ATOM_EXPECTED = "number, 'x', 'pi', 'e', function call or '('"


class Token(NamedTuple):
    kind: str
    text: str
    offset: int


def tokenize(text):
    """
    Split expression text into tokens carrying byte offsets.

    :param text: Expression source.
    :type text: str
    :return: Tokens, terminated by an ``end`` token.
    :rtype: list of Token
    :raises ExpressionSyntaxError: On a character that starts no token.
    """
    tokens = []
    position = 0
    while position < len(text):
        match = _TOKEN.match(text, position)
        if match is None:
            raise ExpressionSyntaxError(_byte_offset(text, position), "a valid token", text)
        if match.lastgroup != "space":
            tokens.append(Token(match.lastgroup, match.group(), _byte_offset(text, position)))
        position = match.end()
    tokens.append(Token("end", "", _byte_offset(text, len(text))))
    return tokens


def _byte_offset(text, index):
    return len(text[:index].encode("utf-8"))


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self):
        return self.tokens[self.index]

    def advance(self):
        token = self.current
        self.index += 1
        return token

    def fail(self, expected):
        raise ExpressionSyntaxError(self.current.offset, expected, self.text)

    def expect(self, symbol):
        if self.current.text != symbol or self.current.kind != "op":
            self.fail(f"'{symbol}'")
        return self.advance()

    def expr(self):
        node = self.term()
        while self.current.kind == "op" and self.current.text in "+-":
            op = "add" if self.advance().text == "+" else "sub"
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.current.kind == "op" and self.current.text in "*/":
            op = "mul" if self.advance().text == "*" else "div"
            node = Binary(op, node, self.factor())
        return node

    def factor(self):
        if self.current.kind == "op" and self.current.text == "-":
            self.advance()
            return Unary("negate", self.factor())
        return self.power()

    def power(self):
        base = self.atom()
        if self.current.kind == "op" and self.current.text == "^":
            self.advance()
            return Binary("pow", base, self.factor())
        return base

    def atom(self):
        token = self.current
        if token.kind == "number":
            self.advance()
            return Num(float(token.text))
        if token.kind == "name":
            self.advance()
            if token.text == "x":
                return Var()
            if token.text in CONSTANTS:
                return Num(CONSTANTS[token.text])
            if token.text in UNARY_FUNCTIONS:
                self.expect("(")
                argument = self.expr()
                self.expect(")")
                return Unary(token.text, argument)
            raise UnknownIdentifier(token.text, token.offset)
        if token.kind == "op" and token.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        self.fail(_ATOM_EXPECTED)


def parse(text):
    """
    Parse expression text into an :class:`~pylaplace.exprlang.nodes.Expr` tree.

    :param text: Non-empty expression source, e.g. ``"log(x)-x"``.
    :type text: str
    :return: Expression tree.
    :rtype: Expr
    :raises ExpressionSyntaxError: On malformed text, with the byte offset and the expected token.
    :raises UnknownIdentifier: On names other than x, pi, e and the supported functions.
    :raises TypeError: If ``text`` is not a string.
    """
    if not isinstance(text, str):
        raise TypeError("Expression text must be a string.")
    parser = _Parser(text)
    node = parser.expr()
    if parser.current.kind != "end":
        parser.fail("operator or end of input")
    return node


def as_expr(source):
    """
    Accept either expression text or an already parsed tree.

    :param source: Expression text or tree.
    :type source: str or Expr
    :rtype: Expr
    """
    if isinstance(source, Expr):
        return source
    if isinstance(source, str):
        return parse(source)
    raise TypeError("Expressions must be given as text or Expr trees.")
