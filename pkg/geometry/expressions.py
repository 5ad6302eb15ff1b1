"""
Recursive descent parser for algebra expressions.

    expr   := ['-'] term (('+'|'-') term)*
    term   := factor (['*'] factor)*
    factor := atom ['^' nat]
    atom   := rational | 'i' | 'h' | 'x' nat | 'U[' int {',' int} ']'
            | '(' expr ')' | 'star(' expr ',' expr ')'

'*' and juxtaposition are the classical (pointwise) product; star(a, b) is
the deformed product. format_element prints in the same grammar.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction

from .algebra import POLYNOMIAL, TORUS, format_element
from .exceptions import ParseError
from .scalars import I_UNIT, GaussianRational

logger = logging.getLogger(__name__)

TOKEN_RE = re.compile(
    r"""
    (?P<space>[ \t\r\n]+)
  | (?P<number>\d+(?:/\d+)?)
  | (?P<star>star\b)
  | (?P<coord>x\d+)
  | (?P<name>[A-Za-z_]\w*)
  | (?P<op>[-+*^(),\[\]])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int


def tokenize(src):
    tokens = []
    position = 0
    while position < len(src):
        match = TOKEN_RE.match(src, position)
        if match is None:
            raise _error(src, position, f"unexpected character {src[position]!r}")
        kind = match.lastgroup
        if kind != "space":
            tokens.append(Token(kind, match.group(), position))
        position = match.end()
    tokens.append(Token("end", "", len(src)))
    return tokens


def _error(src, offset, message):
    line = src.count("\n", 0, offset) + 1
    column = offset - (src.rfind("\n", 0, offset) + 1) + 1
    return ParseError(message, line=line if "\n" in src else None, column=column)


class ExpressionParser:
    def __init__(self, src, algebra):
        self.src = src
        self.algebra = algebra
        self.tokens = tokenize(src)
        self.position = 0

    @property
    def current(self):
        return self.tokens[self.position]

    def error(self, message, token=None):
        token = token or self.current
        return _error(self.src, token.offset, message)

    def advance(self):
        token = self.current
        self.position += 1
        return token

    def accept(self, text):
        if self.current.kind == "op" and self.current.text == text:
            return self.advance()
        return None

    def expect(self, text):
        token = self.accept(text)
        if token is None:
            found = self.current.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return token

    def parse(self):
        value = self.expr()
        if self.current.kind != "end":
            raise self.error(f"unexpected {self.current.text!r}")
        return value

    def expr(self):
        negate = self.accept("-") is not None
        value = self.term()
        if negate:
            value = -value
        while True:
            if self.accept("+"):
                value = value + self.term()
            elif self.accept("-"):
                value = value - self.term()
            else:
                return value

    def _starts_atom(self):
        token = self.current
        if token.kind in ("number", "star", "coord", "name"):
            return True
        return token.kind == "op" and token.text == "("

    def term(self):
        value = self.factor()
        while True:
            if self.accept("*"):
                value = self.algebra.classical_mul(value, self.factor())
            elif self._starts_atom():
                value = self.algebra.classical_mul(value, self.factor())
            else:
                return value

    def factor(self):
        token = self.current
        base = self.atom()
        if not self.accept("^"):
            return base
        exponent_token = self.current
        if exponent_token.kind != "number" or "/" in exponent_token.text:
            raise self.error("exponent must be a natural number")
        self.advance()
        exponent = int(exponent_token.text)
        if token.kind == "name" and token.text == "h":
            if exponent > self.algebra.order:
                logger.warning(
                    "h^%d exceeds truncation order %d and is dropped", exponent, self.algebra.order
                )
            return self.algebra.h(exponent)
        result = self.algebra.one()
        for _ in range(exponent):
            result = self.algebra.classical_mul(result, base)
        return result

    def atom(self):
        algebra = self.algebra
        token = self.current
        if token.kind == "number":
            self.advance()
            try:
                value = Fraction(token.text)
            except ZeroDivisionError:
                raise self.error("zero denominator", token) from None
            return algebra.constant(GaussianRational(value))
        if token.kind == "star":
            self.advance()
            self.expect("(")
            left = self.expr()
            self.expect(",")
            right = self.expr()
            self.expect(")")
            return algebra.star(left, right)
        if token.kind == "coord":
            self.advance()
            index = int(token.text[1:])
            if algebra.kind != POLYNOMIAL or not 1 <= index <= algebra.dim:
                raise self.error(f"unknown generator {token.text}", token)
            return algebra.generator(index - 1)
        if token.kind == "name":
            if token.text == "i":
                self.advance()
                return algebra.constant(I_UNIT)
            if token.text == "h":
                self.advance()
                return algebra.h()
            if token.text == "U":
                self.advance()
                return self.torus_mode(token)
            raise self.error(f"unknown name {token.text!r}", token)
        if self.accept("("):
            value = self.expr()
            self.expect(")")
            return value
        found = token.text or "end of input"
        raise self.error(f"unexpected {found!r}")

    def torus_mode(self, token):
        if self.algebra.kind != TORUS:
            raise self.error("U[...] modes need a torus algebra", token)
        self.expect("[")
        modes = [self.integer()]
        while self.accept(","):
            modes.append(self.integer())
        self.expect("]")
        if len(modes) != self.algebra.dim:
            raise self.error(f"torus mode needs {self.algebra.dim} entries", token)
        return self.algebra.monomial(modes)

    def integer(self):
        sign = -1 if self.accept("-") else 1
        token = self.current
        if token.kind != "number" or "/" in token.text:
            raise self.error("expected an integer")
        self.advance()
        return sign * int(token.text)


def parse_expression(src, algebra):
    """Parse src into an exact element of algebra."""
    return ExpressionParser(src, algebra).parse()


def print_element(a):
    return format_element(a)
