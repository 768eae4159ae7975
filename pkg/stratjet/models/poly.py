"""Polynomial rings over the exact fields and exponent-vector bookkeeping.

Polynomials are sympy ``PolyElement`` values of a ring in ``x1..xd`` with the
graded-lexicographic order; a ``PolyElement`` is a sparse map exponent tuple ->
field element that never stores zeros.
"""
from functools import lru_cache
from itertools import combinations
from math import comb, factorial
from typing import Dict, Iterator, List, Sequence, Tuple

from sympy.polys.orderings import grlex
from sympy.polys.rings import ring

from ..errors import DimensionMismatchError
from .field import ScalarField

Exponent = Tuple[int, ...]


@lru_cache(maxsize=None)
def poly_ring(d: int, characteristic: int = 0, prefix: str = 'x'):
    """The ring k[prefix1..prefixd]; cached so equal requests share one ring"""
    if d < 1:
        raise DimensionMismatchError(f'polynomial rings need at least one variable, got d={d}')
    names = ','.join(f'{prefix}{i}' for i in range(1, d + 1))
    return ring(names, ScalarField(characteristic).domain, grlex)[0]


def ring_field(R) -> ScalarField:
    return ScalarField(int(R.domain.characteristic()))


def ring_dim(R) -> int:
    return R.ngens


@lru_cache(maxsize=None)
def exponents_of_degree(d: int, k: int) -> Tuple[Exponent, ...]:
    """All exponent vectors of total degree k, lexicographically descending"""
    if d == 1:
        return ((k,),)
    out = []
    for first in range(k, -1, -1):
        for rest in exponents_of_degree(d - 1, k - first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def multi_indices(d: int, m: int) -> Tuple[Exponent, ...]:
    """Basis order for P^m and for monomials of degree <= m: by degree, then lex descending"""
    out: List[Exponent] = []
    for k in range(m + 1):
        out.extend(exponents_of_degree(d, k))
    return tuple(out)


@lru_cache(maxsize=None)
def index_of(d: int, m: int) -> Dict[Exponent, int]:
    return {alpha: i for i, alpha in enumerate(multi_indices(d, m))}


@lru_cache(maxsize=None)
def form_basis(d: int, p: int) -> Tuple[Tuple[int, ...], ...]:
    """Strictly increasing index tuples (0-based) of length p"""
    if p < 0 or p > d:
        return ()
    return tuple(combinations(range(d), p))


def norm(alpha: Sequence[int]) -> int:
    return sum(alpha)


def unit_vector(d: int, j: int) -> Exponent:
    return tuple(1 if i == j else 0 for i in range(d))


def add(a: Sequence[int], b: Sequence[int]) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence[int], b: Sequence[int]) -> Exponent:
    return tuple(x - y for x, y in zip(a, b))


def dominates(a: Sequence[int], b: Sequence[int]) -> bool:
    return all(x >= y for x, y in zip(a, b))


def multi_binomial(a: Sequence[int], b: Sequence[int]) -> int:
    out = 1
    for x, y in zip(a, b):
        out *= comb(x, y)
    return out


def multi_factorial(a: Sequence[int]) -> int:
    out = 1
    for x in a:
        out *= factorial(x)
    return out


def sub_exponents(gamma: Sequence[int]) -> Iterator[Exponent]:
    """All a <= gamma componentwise"""
    if not gamma:
        yield ()
        return
    for head in range(gamma[0] + 1):
        for tail in sub_exponents(gamma[1:]):
            yield (head,) + tail


def hasse(f, alpha: Sequence[int]):
    """Coefficient of t^alpha in f(x + t)"""
    R = f.ring
    alpha = tuple(alpha)
    if len(alpha) != R.ngens:
        raise DimensionMismatchError(
            f'exponent {alpha} does not match {R.ngens} variables')
    terms = {}
    for monom, coeff in f.items():
        if not dominates(monom, alpha):
            continue
        c = coeff * R.domain.convert(multi_binomial(monom, alpha))
        if c:
            key = sub(monom, alpha)
            terms[key] = terms.get(key, R.domain.zero) + c
    return R.from_dict(terms)


def degree(f) -> int:
    """Total degree; -1 for the zero polynomial"""
    if not f:
        return -1
    return max(sum(m) for m in f.keys())


def monomial(R, alpha: Sequence[int], coeff=None):
    c = R.domain.one if coeff is None else coeff
    return R.from_dict({tuple(alpha): c})


def substitute_linear(f, G):
    """f(Gx) for a square matrix G given as nested sequences of field elements"""
    R = f.ring
    d = R.ngens
    images = []
    for i in range(d):
        images.append(R.from_dict({unit_vector(d, j): G[i][j] for j in range(d) if G[i][j]}))
    out = R.zero
    for monom, coeff in f.items():
        term = R.one * coeff
        for i, e in enumerate(monom):
            if e:
                term = term * images[i] ** e
        out = out + term
    return out


def format_poly(f, field: ScalarField = None, prefix: str = 'x') -> str:
    """Canonical grlex literal accepted back by the polynomial parser"""
    if not f:
        return '0'
    field = field or ring_field(f.ring)
    pieces = []
    for monom, coeff in f.terms(order=grlex):
        value = field.to_fraction(coeff)
        negative = value < 0
        magnitude = -value if negative else value
        factors = []
        for i, e in enumerate(monom):
            if e == 1:
                factors.append(f'{prefix}{i + 1}')
            elif e > 1:
                factors.append(f'{prefix}{i + 1}^{e}')
        if magnitude.denominator == 1:
            scalar = str(magnitude.numerator)
        else:
            scalar = f'{magnitude.numerator}/{magnitude.denominator}'
        if factors and magnitude == 1:
            body = '*'.join(factors)
        else:
            body = '*'.join([scalar] + factors)
        if not pieces:
            pieces.append(f'-{body}' if negative else body)
        else:
            pieces.append(f' - {body}' if negative else f' + {body}')
    return ''.join(pieces)
