"""Truncated thickenings of a point and matrices over them.

B = k[t1..ts] / (monomials of degree > ν), in plain mode, or the truncated
divided power algebra with basis t^[a] and t^[a]·t^[b] = C(a+b, a)·t^[a+b].
Elements are dense coefficient vectors on the monomial basis of degree <= ν.
"""
from dataclasses import dataclass
from math import comb, factorial
from typing import Dict, Sequence, Tuple

from ..errors import DimensionMismatchError, NonInvertibleError, SectionMismatchError, ShapeError
from .field import ScalarField
from .jet import MODES, product_factor
from .poly import Exponent, add, index_of, multi_factorial, multi_indices, norm


@dataclass(frozen=True)
class Thickening:
    s: int
    nu: int
    field: ScalarField = ScalarField(0)
    mode: str = 'plain'

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f'unknown thickening mode {self.mode!r}')
        if self.s < 1 or self.nu < 0:
            raise ShapeError(f'thickening needs s >= 1 and nu >= 0, got s={self.s}, nu={self.nu}')

    @property
    def basis(self) -> Tuple[Exponent, ...]:
        return multi_indices(self.s, self.nu)

    @property
    def dim(self) -> int:
        return comb(self.nu + self.s, self.s)

    def element(self, terms: Dict[Exponent, object]) -> 'ThickeningElement':
        """Sparse {exponent: scalar} in the native basis; degrees above ν are dropped"""
        K = self.field.domain
        idx = index_of(self.s, self.nu)
        coeffs = [K.zero] * self.dim
        for a, c in terms.items():
            a = tuple(a)
            if len(a) != self.s:
                raise DimensionMismatchError(f'exponent {a} in a thickening with s={self.s}')
            if norm(a) <= self.nu:
                coeffs[idx[a]] += self.field.convert(c)
        return ThickeningElement(self, tuple(coeffs))

    def scalar(self, c) -> 'ThickeningElement':
        return self.element({(0,) * self.s: c})

    def zero(self) -> 'ThickeningElement':
        return self.element({})

    def one(self) -> 'ThickeningElement':
        return self.scalar(1)

    def t(self, i: int) -> 'ThickeningElement':
        """t_i, 1-based"""
        return self.element({tuple(1 if j == i - 1 else 0 for j in range(self.s)): 1})

    def from_poly(self, f) -> 'ThickeningElement':
        """Image of a polynomial in t1..ts; t^a is a!·t^[a] in divided mode"""
        if f.ring.ngens != self.s:
            raise DimensionMismatchError(f'polynomial in {f.ring.ngens} variables for s={self.s}')
        terms = {}
        for a, c in f.items():
            if norm(a) > self.nu:
                continue
            if self.mode == 'divided':
                c = c * self.field.integer(multi_factorial(a))
            terms[a] = terms.get(a, self.field.zero) + c
        return self.element(terms)

    def __repr__(self):
        return f'<Thickening s={self.s} nu={self.nu} {self.field.name} {self.mode}>'


@dataclass(frozen=True)
class ThickeningElement:
    algebra: Thickening
    coeffs: Tuple

    def terms(self):
        return [(a, c) for a, c in zip(self.algebra.basis, self.coeffs) if c]

    @property
    def constant(self):
        return self.coeffs[0]

    def in_ideal(self) -> bool:
        return not self.constant

    def is_zero(self) -> bool:
        return all(not c for c in self.coeffs)

    def _check(self, other: 'ThickeningElement'):
        if other.algebra != self.algebra:
            raise DimensionMismatchError(f'{self.algebra!r} and {other.algebra!r} differ')

    def __add__(self, other: 'ThickeningElement') -> 'ThickeningElement':
        self._check(other)
        return ThickeningElement(self.algebra, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> 'ThickeningElement':
        return ThickeningElement(self.algebra, tuple(-a for a in self.coeffs))

    def __sub__(self, other: 'ThickeningElement') -> 'ThickeningElement':
        return self + (-other)

    def scale(self, c) -> 'ThickeningElement':
        c = self.algebra.field.convert(c)
        return ThickeningElement(self.algebra, tuple(c * a for a in self.coeffs))

    def __mul__(self, other: 'ThickeningElement') -> 'ThickeningElement':
        self._check(other)
        B = self.algebra
        out = {}
        for a, x in self.terms():
            for b, y in other.terms():
                ab = add(a, b)
                if norm(ab) > B.nu:
                    continue
                out[ab] = out.get(ab, B.field.zero) + x * y * B.field.integer(product_factor(B.mode, a, b))
        return B.element(out)

    def __pow__(self, n: int) -> 'ThickeningElement':
        out = self.algebra.one()
        for _ in range(n):
            out = out * self
        return out

    def gamma(self, n: int) -> 'ThickeningElement':
        """n-th divided power of an element of J"""
        B = self.algebra
        if not self.in_ideal():
            raise SectionMismatchError('divided powers are only defined on the nilpotent ideal')
        if n == 0:
            return B.one()
        if B.mode == 'plain':
            if B.field.is_zero_int(factorial(n)):
                raise NonInvertibleError(f'{n}! is not invertible in {B.field.name}; use a divided thickening')
            return (self ** n).scale(B.field.inverse_int(factorial(n)))
        # γ_n(x + y) = Σ γ_i(x)·γ_{n-i}(y), built term by term
        partial = [B.one()] + [B.zero()] * n
        for a, c in self.terms():
            powers = [B.one()] + [_gamma_monomial(B, a, k).scale(c ** k) for k in range(1, n + 1)]
            partial = [sum((partial[i] * powers[m - i] for i in range(m + 1)), B.zero())
                       for m in range(n + 1)]
        return partial[n]

    def __repr__(self):
        shown = ' + '.join(f'{self.algebra.field.to_text(c)}*t{list(a)}' for a, c in self.terms())
        return f'<ThickeningElement {shown or "0"}>'


def _gamma_monomial(B: Thickening, a: Exponent, n: int) -> ThickeningElement:
    """γ_n(t^[a]) = (na)!/(n!·(a!)^n)·t^[na] with the divided power taken on the first variable"""
    j = next(i for i, x in enumerate(a) if x)
    na = tuple(n * x for x in a)
    if norm(na) > B.nu:
        return B.zero()
    coeff = factorial(n * a[j]) // (factorial(n) * factorial(a[j]) ** n)
    for i, x in enumerate(a):
        if i != j:
            coeff *= factorial(n * x) // factorial(x) ** n
    return B.element({na: coeff})


@dataclass(frozen=True)
class Section:
    """Images h(x_i) in B of the coordinates of A^d"""
    thickening: Thickening
    images: Tuple[ThickeningElement, ...]

    @property
    def d(self) -> int:
        return len(self.images)

    def point(self) -> Tuple:
        return tuple(h.constant for h in self.images)

    def agrees_mod_ideal(self, other: 'Section') -> bool:
        return self.thickening == other.thickening and self.point() == other.point()

    def difference(self, other: 'Section') -> Tuple[ThickeningElement, ...]:
        """η = other − self, componentwise"""
        if not self.agrees_mod_ideal(other):
            raise SectionMismatchError(
                f'sections differ modulo the nilpotent ideal: {self.point()} vs {other.point()}')
        return tuple(b - a for a, b in zip(self.images, other.images))

    def evaluate(self, f) -> ThickeningElement:
        """f(h) for a polynomial f in x1..xd"""
        if f.ring.ngens != self.d:
            raise DimensionMismatchError(f'polynomial in {f.ring.ngens} variables, section of dimension {self.d}')
        B = self.thickening
        out = B.zero()
        for monom, c in f.items():
            term = B.scalar(c)
            for h, e in zip(self.images, monom):
                if e:
                    term = term * h ** e
            out = out + term
        return out


@dataclass(frozen=True)
class BMatrix:
    """Square or rectangular matrix with entries in a thickening"""
    thickening: Thickening
    rows: Tuple[Tuple[ThickeningElement, ...], ...]

    @classmethod
    def identity(cls, B: Thickening, n: int) -> 'BMatrix':
        return cls(B, tuple(tuple(B.one() if i == j else B.zero() for j in range(n)) for i in range(n)))

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    def __matmul__(self, other: 'BMatrix') -> 'BMatrix':
        if self.shape[1] != other.shape[0]:
            raise ShapeError(f'cannot multiply {self.shape} by {other.shape}')
        B = self.thickening
        rows = []
        for i in range(self.shape[0]):
            rows.append(tuple(sum((self.rows[i][k] * other.rows[k][j] for k in range(self.shape[1])), B.zero())
                              for j in range(other.shape[1])))
        return BMatrix(B, tuple(rows))

    def entry(self, i: int, j: int) -> ThickeningElement:
        return self.rows[i][j]

    def is_identity(self) -> bool:
        return self == BMatrix.identity(self.thickening, self.shape[0])

    def mismatches(self, other: 'BMatrix', limit: int = 10) -> Sequence[Tuple[int, int]]:
        out = []
        for i, (r, s) in enumerate(zip(self.rows, other.rows)):
            for j, (a, b) in enumerate(zip(r, s)):
                if a != b:
                    out.append((i, j))
                    if len(out) >= limit:
                        return out
        return out


@dataclass(frozen=True)
class CrystalFiber:
    """B ⊗_h L for a free module L of the given rank"""
    section: Section
    rank: int
    ring: object

    @property
    def thickening(self) -> Thickening:
        return self.section.thickening

    def evaluate(self, vector: Sequence) -> Tuple[ThickeningElement, ...]:
        if len(vector) != self.rank:
            raise DimensionMismatchError(f'vector of length {len(vector)} in a rank {self.rank} fiber')
        return tuple(self.section.evaluate(f if getattr(f, 'ring', None) == self.ring else self.ring(f))
                     for f in vector)
