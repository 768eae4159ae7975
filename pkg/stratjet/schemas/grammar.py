"""Polynomial literal grammar shared by every input format"""
import re
from typing import List, NamedTuple, Optional

from ..errors import PolyParseError
from ..models.field import ScalarField
from ..models.poly import poly_ring

MAX_EXPONENT = 10000

_TOKEN = re.compile(r'\s*(?:(?P<int>\d+)|(?P<var>[A-Za-z]+\d*)|(?P<op>[-+*/^()]))')


class Token(NamedTuple):
    kind: str
    text: str
    position: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == '':
            break
        match = _TOKEN.match(text, pos)
        if not match or match.end() == pos:
            bad = len(text) - len(text[pos:].lstrip())
            raise PolyParseError(f'unexpected character {text[bad]!r} at position {bad}', bad, text)
        kind = match.lastgroup
        start = match.start(kind)
        tokens.append(Token(kind, match.group(kind), start))
        pos = match.end()
    tokens.append(Token('end', '', len(text)))
    return tokens


class _Parser:
    """Recursive descent over

        expr   := term (('+' | '-') term)*
        term   := unary ('*' unary)*
        unary  := ('+' | '-') unary | power
        power  := atom ('^' INT)?
        atom   := INT ('/' INT)? | VAR | '(' expr ')'
    """

    def __init__(self, text: str, R, field: ScalarField, prefix: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.R = R
        self.field = field
        self.prefix = prefix

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def fail(self, message: str, token: Optional[Token] = None):
        token = token or self.current
        raise PolyParseError(f'{message} at position {token.position}', token.position, self.text)

    def take(self, text: str) -> bool:
        if self.current.kind == 'op' and self.current.text == text:
            self.pos += 1
            return True
        return False

    def parse(self):
        if self.current.kind == 'end':
            self.fail('empty polynomial')
        value = self.expr()
        if self.current.kind != 'end':
            self.fail(f'unexpected {self.current.text!r}')
        return value

    def expr(self):
        value = self.term()
        while True:
            if self.take('+'):
                value = value + self.term()
            elif self.take('-'):
                value = value - self.term()
            else:
                return value

    def term(self):
        value = self.unary()
        while self.take('*'):
            value = value * self.unary()
        return value

    def unary(self):
        if self.take('-'):
            return -self.unary()
        if self.take('+'):
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.take('^'):
            token = self.current
            if token.kind != 'int':
                self.fail('exponent must be a nonnegative integer literal')
            self.pos += 1
            exponent = int(token.text)
            if exponent > MAX_EXPONENT:
                self.fail(f'exponent {exponent} exceeds {MAX_EXPONENT}', token)
            return base ** exponent
        return base

    def atom(self):
        token = self.current
        if token.kind == 'int':
            self.pos += 1
            numerator = int(token.text)
            if self.take('/'):
                denominator = self.current
                if denominator.kind != 'int':
                    self.fail('denominator must be an integer literal')
                self.pos += 1
                return self.R(self.field.ratio(numerator, int(denominator.text)))
            return self.R(self.field.integer(numerator))
        if token.kind == 'var':
            self.pos += 1
            return self.variable(token)
        if self.take('('):
            value = self.expr()
            if not self.take(')'):
                self.fail('missing closing parenthesis')
            return value
        if token.kind == 'end':
            self.fail('unexpected end of input')
        self.fail(f'unexpected {token.text!r}')

    def variable(self, token: Token):
        name = token.text
        index = name[len(self.prefix):]
        if not name.startswith(self.prefix) or not index.isdigit():
            self.fail(f'unknown variable {name!r}', token)
        i = int(index)
        if not 1 <= i <= self.R.ngens:
            self.fail(f'unknown variable {name!r} (ring has {self.R.ngens} variables)', token)
        return self.R.gens[i - 1]


def infer_dimension(text: str, prefix: str = 'x') -> int:
    indices = [int(m) for m in re.findall(rf'\b{prefix}(\d+)', text)]
    return max(indices + [1])


def parse_poly(text: str, d: Optional[int] = None, field: ScalarField = ScalarField(0), prefix: str = 'x'):
    if d is None:
        d = infer_dimension(text, prefix)
    R = poly_ring(d, field.characteristic, prefix)
    return _Parser(text, R, field, prefix).parse()
