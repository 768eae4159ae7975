from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Any, Union

from sympy import isprime
from sympy.polys.domains import GF, QQ

from ..errors import FieldError, NonInvertibleError

MAX_PRIME = 2 ** 31


@lru_cache(maxsize=None)
def _domain(characteristic: int):
    return QQ if characteristic == 0 else GF(characteristic)


@dataclass(frozen=True)
class ScalarField:
    """Exact coefficient field: rationals in characteristic 0, integers mod p otherwise"""
    characteristic: int = 0

    def __post_init__(self):
        p = self.characteristic
        if p != 0 and not (0 < p < MAX_PRIME and isprime(p)):
            raise FieldError(f'characteristic must be 0 or a prime below 2^31, got {p}')

    @property
    def domain(self):
        return _domain(self.characteristic)

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    @property
    def name(self) -> str:
        return 'QQ' if self.characteristic == 0 else f'GF({self.characteristic})'

    def convert(self, value: Union[int, Fraction, Any]):
        """Coerce an int, a Fraction or a domain element into the field"""
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            return self.domain.convert(value)
        if isinstance(value, Fraction):
            return self.ratio(value.numerator, value.denominator)
        return self.domain.convert(value)

    def ratio(self, numerator: int, denominator: int):
        if self.is_zero_int(denominator):
            raise NonInvertibleError(
                f'denominator {denominator} is not invertible in {self.name}')
        return self.domain.convert(numerator) / self.domain.convert(denominator)

    def is_zero_int(self, n: int) -> bool:
        if self.characteristic == 0:
            return n == 0
        return n % self.characteristic == 0

    def integer(self, n: int):
        return self.domain.convert(n)

    def inverse_int(self, n: int):
        return self.ratio(1, n)

    def factorial(self, n: int):
        return self.domain.convert(factorial(n))

    def binomial(self, n: int, k: int):
        return self.domain.convert(comb(n, k))

    def is_zero(self, a) -> bool:
        return not a

    def to_fraction(self, a) -> Fraction:
        if self.characteristic == 0:
            return Fraction(int(self.domain.numer(a)), int(self.domain.denom(a)))
        return Fraction(int(a) % self.characteristic)

    def to_text(self, a) -> str:
        """Canonical literal: `3`, `-7/2` over QQ; representative in [0, p) over GF(p)"""
        value = self.to_fraction(a)
        if value.denominator == 1:
            return str(value.numerator)
        return f'{value.numerator}/{value.denominator}'

    def __repr__(self):
        return f'<ScalarField {self.name}>'
