from dataclasses import dataclass
from math import comb
from typing import Dict, Iterable, Tuple

from ..errors import DimensionMismatchError, OrderError
from .field import ScalarField
from .poly import Exponent, exponents_of_degree, form_basis, multi_binomial, multi_indices, norm, poly_ring

MODES = ('plain', 'divided')


def product_factor(mode: str, a: Exponent, b: Exponent) -> int:
    """Integer factor of ξ^a·ξ^b on the monomial of exponent a+b"""
    if mode == 'plain':
        return 1
    return multi_binomial(tuple(x + y for x, y in zip(a, b)), a)


@dataclass(frozen=True)
class JetAlgebra:
    """The principal parts algebra P^m over k[x1..xd] with basis ξ^α (or ξ^[α]), |α| <= m"""
    d: int
    m: int
    field: ScalarField = ScalarField(0)
    mode: str = 'plain'

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f'unknown jet mode {self.mode!r}')
        if self.m < 0:
            raise OrderError(f'jet order must be >= 0, got {self.m}')
        if self.d < 1:
            raise DimensionMismatchError(f'dimension must be >= 1, got {self.d}')

    @property
    def ring(self):
        return poly_ring(self.d, self.field.characteristic)

    @property
    def basis(self) -> Tuple[Exponent, ...]:
        return multi_indices(self.d, self.m)

    @property
    def rank(self) -> int:
        return comb(self.m + self.d, self.d)

    def at_order(self, n: int) -> 'JetAlgebra':
        return JetAlgebra(self.d, n, self.field, self.mode)

    def in_mode(self, mode: str) -> 'JetAlgebra':
        return JetAlgebra(self.d, self.m, self.field, mode)

    def element(self, terms: Dict[Exponent, object]) -> 'JetElement':
        """Build an element, dropping zero coefficients and exponents above m (truncation)"""
        R = self.ring
        kept = {}
        for alpha, coeff in terms.items():
            alpha = tuple(alpha)
            if len(alpha) != self.d:
                raise DimensionMismatchError(f'exponent {alpha} does not match d={self.d}')
            if norm(alpha) > self.m:
                continue
            c = coeff if getattr(coeff, 'ring', None) == R else R(coeff)
            if c:
                kept[alpha] = c
        order = {a: i for i, a in enumerate(self.basis)}
        return JetElement(self, tuple(sorted(kept.items(), key=lambda t: order[t[0]])))

    def zero(self) -> 'JetElement':
        return JetElement(self, ())

    def unit(self) -> 'JetElement':
        return self.element({(0,) * self.d: self.ring.one})

    def monomial(self, alpha: Iterable[int], coeff=None) -> 'JetElement':
        return self.element({tuple(alpha): self.ring.one if coeff is None else coeff})

    def xi(self, j: int) -> 'JetElement':
        """ξ_j for 1 <= j <= d"""
        return self.monomial(tuple(1 if i == j - 1 else 0 for i in range(self.d)))

    def __repr__(self):
        return f'<JetAlgebra P^{self.m} d={self.d} {self.field.name} {self.mode}>'


@dataclass(frozen=True)
class JetElement:
    """Sparse α -> polynomial map; coefficients act through the left structure"""
    algebra: JetAlgebra
    terms: Tuple[Tuple[Exponent, object], ...]

    def as_dict(self) -> Dict[Exponent, object]:
        return dict(self.terms)

    def coeff(self, alpha: Iterable[int]):
        return self.as_dict().get(tuple(alpha), self.algebra.ring.zero)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: 'JetElement'):
        if other.algebra != self.algebra:
            raise DimensionMismatchError(f'{self.algebra!r} and {other.algebra!r} differ')

    def __add__(self, other: 'JetElement') -> 'JetElement':
        self._check(other)
        out = self.as_dict()
        for alpha, c in other.terms:
            out[alpha] = out.get(alpha, self.algebra.ring.zero) + c
        return self.algebra.element(out)

    def __neg__(self) -> 'JetElement':
        return self.algebra.element({a: -c for a, c in self.terms})

    def __sub__(self, other: 'JetElement') -> 'JetElement':
        return self + (-other)

    def scale(self, f) -> 'JetElement':
        """Multiply every coefficient by the polynomial (or scalar) f"""
        return self.algebra.element({a: c * f for a, c in self.terms})


@dataclass(frozen=True)
class JetTensor:
    """Element of P^{m_1}⊗...⊗P^{m_k} with all functions moved to the far left"""
    d: int
    orders: Tuple[int, ...]
    field: ScalarField
    mode: str
    terms: Tuple[Tuple[Tuple[Exponent, ...], object], ...]

    @classmethod
    def build(cls, d: int, orders, field: ScalarField, mode: str, terms: Dict) -> 'JetTensor':
        R = poly_ring(d, field.characteristic)
        kept = {}
        for key, c in terms.items():
            if any(norm(a) > m for a, m in zip(key, orders)):
                continue
            if c:
                kept[tuple(key)] = c if getattr(c, 'ring', None) == R else R(c)
        rank = [{a: i for i, a in enumerate(multi_indices(d, m))} for m in orders]
        ordered = sorted(kept.items(), key=lambda t: tuple(rank[i][a] for i, a in enumerate(t[0])))
        return cls(d, tuple(orders), field, mode, tuple(ordered))

    def as_dict(self):
        return dict(self.terms)

    def __add__(self, other: 'JetTensor') -> 'JetTensor':
        if (other.d, other.orders, other.mode) != (self.d, self.orders, self.mode):
            raise DimensionMismatchError('tensor factors differ')
        out = self.as_dict()
        R = poly_ring(self.d, self.field.characteristic)
        for key, c in other.terms:
            out[key] = out.get(key, R.zero) + c
        return JetTensor.build(self.d, self.orders, self.field, self.mode, out)

    def is_zero(self) -> bool:
        return not self.terms


@dataclass(frozen=True)
class GradedJetPiece:
    """Free module on {ξ^α : |α| = n} ⊗ {dx_I : |I| = p}"""
    d: int
    n: int
    p: int

    @property
    def basis(self) -> Tuple[Tuple[Exponent, Tuple[int, ...]], ...]:
        if self.n < 0 or self.p < 0 or self.p > self.d:
            return ()
        return tuple((alpha, I) for alpha in exponents_of_degree(self.d, self.n)
                     for I in form_basis(self.d, self.p))

    @property
    def rank(self) -> int:
        return len(self.basis)
