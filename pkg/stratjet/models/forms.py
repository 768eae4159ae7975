from dataclasses import dataclass
from math import comb
from typing import Dict, Mapping, Optional, Sequence, Tuple

from ..errors import ComplexError, DimensionMismatchError, OrderError, ShapeError
from .field import ScalarField
from .matrix import Matrix
from .module import DiffOperator, FreeModule
from .poly import form_basis, poly_ring

FormIndex = Tuple[int, ...]


def wedge_sign(I: Sequence[int], J: Sequence[int]) -> Tuple[int, Optional[FormIndex]]:
    """dx_I ∧ dx_J = sign·dx_K with K sorted; (0, None) on a repeated index"""
    if set(I) & set(J):
        return 0, None
    seq = list(I) + list(J)
    inversions = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
    return (-1 if inversions % 2 else 1), tuple(sorted(seq))


def form_label(I: FormIndex) -> str:
    if not I:
        return '1'
    return '^'.join(f'dx{i + 1}' for i in I)


@dataclass(frozen=True)
class FormModule:
    """Ω^p on A^d: basis dx_I, I strictly increasing"""
    d: int
    p: int
    field: ScalarField = ScalarField(0)

    @property
    def basis(self) -> Tuple[FormIndex, ...]:
        return form_basis(self.d, self.p)

    @property
    def rank(self) -> int:
        return comb(self.d, self.p) if 0 <= self.p <= self.d else 0

    def index(self, I: FormIndex) -> int:
        return self.basis.index(tuple(I))

    @property
    def module(self) -> FreeModule:
        return FreeModule(self.d, self.rank, self.field, tuple(form_label(I) for I in self.basis))

    def tensor(self, rank: int) -> FreeModule:
        """Ω^p ⊗ O^rank, rank index varying fastest"""
        labels = tuple(f'{form_label(I)}*e{k + 1}' for I in self.basis for k in range(rank))
        return FreeModule(self.d, self.rank * rank, self.field, labels)


@dataclass(frozen=True)
class Form:
    """A p-form Σ f_I dx_I with polynomial coefficients"""
    d: int
    p: int
    terms: Tuple[Tuple[FormIndex, object], ...]
    field: ScalarField = ScalarField(0)

    @classmethod
    def build(cls, d: int, p: int, terms: Mapping, field: ScalarField = ScalarField(0)) -> 'Form':
        R = poly_ring(d, field.characteristic)
        order = {I: n for n, I in enumerate(form_basis(d, p))}
        kept = {}
        for I, f in terms.items():
            I = tuple(I)
            if len(I) != p:
                raise DimensionMismatchError(f'index {I} in a {p}-form')
            if I not in order:
                raise ShapeError(f'form index {I} is not strictly increasing inside 0..{d - 1}')
            f = f if getattr(f, 'ring', None) == R else R(f)
            if f:
                kept[I] = f
        return cls(d, p, tuple(sorted(kept.items(), key=lambda t: order[t[0]])), field)

    def as_dict(self) -> Dict[FormIndex, object]:
        return dict(self.terms)

    def coeff(self, I):
        return self.as_dict().get(tuple(I), poly_ring(self.d, self.field.characteristic).zero)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: 'Form') -> 'Form':
        if (self.d, self.p) != (other.d, other.p):
            raise DimensionMismatchError('forms of different degree or dimension')
        out = self.as_dict()
        for I, f in other.terms:
            out[I] = out[I] + f if I in out else f
        return Form.build(self.d, self.p, out, self.field)

    def __neg__(self) -> 'Form':
        return Form.build(self.d, self.p, {I: -f for I, f in self.terms}, self.field)

    def __sub__(self, other: 'Form') -> 'Form':
        return self + (-other)


@dataclass(frozen=True)
class DifferentialComplex:
    """F^0 -> F^1 -> ... with differentials of order at most one.

    d² = 0 is not enforced here; verify_order1_relations reports it.
    """
    modules: Tuple[FreeModule, ...]
    operators: Tuple[DiffOperator, ...]
    name: str = ''

    def __post_init__(self):
        if len(self.operators) != len(self.modules) - 1:
            raise ShapeError(f'{len(self.modules)} modules need {len(self.modules) - 1} differentials')
        for i, D in enumerate(self.operators):
            if D.source != self.modules[i] or D.target != self.modules[i + 1]:
                raise ShapeError(f'differential {i} does not connect F^{i} to F^{i + 1}')
            if D.effective_order > 1:
                raise OrderError(f'differential {i} has order {D.effective_order} > 1')

    @property
    def d(self) -> int:
        return self.modules[0].d

    @property
    def field(self) -> ScalarField:
        return self.modules[0].field

    @property
    def length(self) -> int:
        return len(self.modules)

    def rank(self, i: int) -> int:
        return self.modules[i].rank if 0 <= i < len(self.modules) else 0

    def operator(self, i: int) -> DiffOperator:
        return self.operators[i]

    def replace(self, i: int, D: DiffOperator, name: str = '') -> 'DifferentialComplex':
        ops = list(self.operators)
        ops[i] = D
        return DifferentialComplex(self.modules, tuple(ops), name or self.name)


@dataclass(frozen=True)
class Bicomplex:
    """Grid I^{p,q} of k-spaces with d′: (p,q) -> (p+1,q) and d″: (p,q) -> (p,q+1)"""
    ranks: Mapping[Tuple[int, int], int]
    dh: Mapping[Tuple[int, int], Matrix]
    dv: Mapping[Tuple[int, int], Matrix]
    field: ScalarField
    name: str = ''

    def __post_init__(self):
        for (p, q), M in self.dh.items():
            if M.shape != (self.rank(p + 1, q), self.rank(p, q)):
                raise ShapeError(f"d' at {(p, q)} has shape {M.shape}")
        for (p, q), M in self.dv.items():
            if M.shape != (self.rank(p, q + 1), self.rank(p, q)):
                raise ShapeError(f"d'' at {(p, q)} has shape {M.shape}")
        for (p, q) in self.ranks:
            if not (self.horizontal(p + 1, q) @ self.horizontal(p, q)).is_zero():
                raise ComplexError(f"d'² != 0 at {(p, q)}")
            if not (self.vertical(p, q + 1) @ self.vertical(p, q)).is_zero():
                raise ComplexError(f"d''² != 0 at {(p, q)}")
            lhs = self.vertical(p + 1, q) @ self.horizontal(p, q)
            rhs = self.horizontal(p, q + 1) @ self.vertical(p, q)
            if lhs != rhs:
                raise ComplexError(f"d' and d'' do not commute at {(p, q)}")

    def rank(self, p: int, q: int) -> int:
        return self.ranks.get((p, q), 0)

    def horizontal(self, p: int, q: int) -> Matrix:
        return self.dh.get((p, q)) or Matrix.zeros(self.rank(p + 1, q), self.rank(p, q), self.field.domain)

    def vertical(self, p: int, q: int) -> Matrix:
        return self.dv.get((p, q)) or Matrix.zeros(self.rank(p, q + 1), self.rank(p, q), self.field.domain)

    @property
    def max_total(self) -> int:
        return max((p + q for p, q in self.ranks), default=-1)
