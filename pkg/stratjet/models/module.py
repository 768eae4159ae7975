from dataclasses import dataclass, field as dc_field
from typing import Dict, Optional, Tuple

from ..errors import DimensionMismatchError, OrderError, ShapeError
from .field import ScalarField
from .matrix import Matrix
from .poly import Exponent, degree, hasse, multi_indices, norm, poly_ring


@dataclass(frozen=True)
class FreeModule:
    """Free module of rank r over k[x1..xd]"""
    d: int
    rank: int
    field: ScalarField = ScalarField(0)
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.rank < 0:
            raise ShapeError(f'rank must be >= 0, got {self.rank}')
        if self.labels is not None and len(self.labels) != self.rank:
            raise ShapeError('one label per basis vector')

    @property
    def ring(self):
        return poly_ring(self.d, self.field.characteristic)

    @property
    def poly_domain(self):
        return self.ring.to_domain()

    def vector(self, coords) -> Tuple:
        coords = tuple(self.ring(c) if getattr(c, 'ring', None) != self.ring else c for c in coords)
        if len(coords) != self.rank:
            raise ShapeError(f'vector of length {len(coords)} in a rank-{self.rank} module')
        return coords

    def basis_vector(self, k: int) -> Tuple:
        R = self.ring
        return tuple(R.one if i == k else R.zero for i in range(self.rank))

    def same_base(self, other: 'FreeModule') -> bool:
        return self.d == other.d and self.field == other.field


@dataclass(frozen=True)
class DiffOperator:
    """Differential operator L -> L' stored as its bar table α ↦ (s ↦ D̄(ξ^α ⊗ s)).

    Only nonzero matrices are stored; the effective order is recomputed from them.
    """
    source: FreeModule
    target: FreeModule
    bar: Tuple[Tuple[Exponent, Matrix], ...] = dc_field(default=())
    declared_order: Optional[int] = None

    def __post_init__(self):
        if not self.source.same_base(self.target):
            raise DimensionMismatchError('source and target live over different bases')
        for alpha, M in self.bar:
            if len(alpha) != self.source.d:
                raise DimensionMismatchError(f'exponent {alpha} does not match d={self.source.d}')
            if M.shape != (self.target.rank, self.source.rank):
                raise ShapeError(f'bar matrix at {alpha} has shape {M.shape}')
        if self.declared_order is not None and self.effective_order > self.declared_order:
            raise OrderError(
                f'effective order {self.effective_order} exceeds declared order {self.declared_order}')

    @classmethod
    def from_table(cls, source: FreeModule, target: FreeModule, table: Dict[Exponent, Matrix],
                   declared_order: Optional[int] = None) -> 'DiffOperator':
        order = {a: i for i, a in enumerate(multi_indices(source.d, max([norm(a) for a in table] or [0])))}
        kept = sorted(((tuple(a), M) for a, M in table.items() if not M.is_zero()),
                      key=lambda t: order[t[0]])
        return cls(source, target, tuple(kept), declared_order)

    @classmethod
    def module_map(cls, source: FreeModule, target: FreeModule, M: Matrix) -> 'DiffOperator':
        return cls.from_table(source, target, {(0,) * source.d: M}, 0)

    @classmethod
    def identity(cls, module: FreeModule) -> 'DiffOperator':
        return cls.module_map(module, module, Matrix.identity(module.rank, module.poly_domain))

    @property
    def d(self) -> int:
        return self.source.d

    @property
    def effective_order(self) -> int:
        return max((norm(a) for a, _ in self.bar), default=0)

    @property
    def order(self) -> int:
        return self.declared_order if self.declared_order is not None else self.effective_order

    def table(self) -> Dict[Exponent, Matrix]:
        return dict(self.bar)

    def matrix(self, alpha) -> Matrix:
        return self.table().get(tuple(alpha)) or Matrix.zeros(
            self.target.rank, self.source.rank, self.source.poly_domain)

    def is_zero(self) -> bool:
        return not self.bar

    def same_action(self, other: 'DiffOperator') -> bool:
        return (self.source, self.target, self.bar) == (other.source, other.target, other.bar)

    def coefficient_degree(self) -> int:
        """Largest degree of a bar entry; -1 for the zero operator"""
        return max((degree(c) for _, M in self.bar for row in M.rows for c in row), default=-1)

    def degree_growth(self) -> int:
        """How much the operator can raise coefficient degree"""
        growth = 0
        for alpha, M in self.bar:
            top = max((degree(c) for row in M.rows for c in row), default=-1)
            growth = max(growth, top - norm(alpha))
        return growth

    def apply(self, s) -> Tuple:
        """D(Σ f_k e_k) = Σ_k Σ_α H_α(f_k)·D̄(ξ^α ⊗ e_k)"""
        s = self.source.vector(s)
        R = self.source.ring
        out = [R.zero] * self.target.rank
        for alpha, M in self.bar:
            for k, f in enumerate(s):
                h = hasse(f, alpha) if f else f
                if not h:
                    continue
                for row in range(self.target.rank):
                    c = M.rows[row][k]
                    if c:
                        out[row] = out[row] + h * c
        return tuple(out)

    def __add__(self, other: 'DiffOperator') -> 'DiffOperator':
        if (self.source, self.target) != (other.source, other.target):
            raise ShapeError('cannot add operators between different modules')
        table = self.table()
        for alpha, M in other.bar:
            table[alpha] = table[alpha] + M if alpha in table else M
        return DiffOperator.from_table(self.source, self.target, table)

    def scale(self, c) -> 'DiffOperator':
        return DiffOperator.from_table(self.source, self.target,
                                       {a: M.scale(c) for a, M in self.bar}, self.declared_order)

    def __neg__(self) -> 'DiffOperator':
        return self.scale(-1)


@dataclass(frozen=True)
class TruncatedTower:
    """Modules F_0..F_N with transition maps F_{n+1} -> F_n"""
    modules: Tuple[FreeModule, ...]
    transitions: Tuple[Matrix, ...]

    def __post_init__(self):
        if len(self.transitions) != len(self.modules) - 1:
            raise ShapeError('a tower of N+1 modules needs N transitions')
        for n, T in enumerate(self.transitions):
            if T.shape != (self.modules[n].rank, self.modules[n + 1].rank):
                raise ShapeError(f'transition {n + 1} -> {n} has shape {T.shape}')

    @property
    def top(self) -> int:
        return len(self.modules) - 1

    def down(self, source_level: int, target_level: int) -> Matrix:
        """Composite transition F_source -> F_target"""
        M = Matrix.identity(self.modules[source_level].rank, self.modules[source_level].poly_domain)
        for n in range(source_level - 1, target_level - 1, -1):
            M = self.transitions[n] @ M
        return M


@dataclass(frozen=True)
class ProMap:
    """Level maps g_n: F_{n+shift} -> G_n of a morphism of truncated towers"""
    source: TruncatedTower
    target: TruncatedTower
    shift: int
    levels: Tuple[Matrix, ...]

    def __post_init__(self):
        for n, g in enumerate(self.levels):
            want = (self.target.modules[n].rank, self.source.modules[n + self.shift].rank)
            if g.shape != want:
                raise ShapeError(f'level map {n} has shape {g.shape}, want {want}')
        for n in range(len(self.levels) - 1):
            lhs = self.target.transitions[n] @ self.levels[n + 1]
            rhs = self.levels[n] @ self.source.transitions[n + self.shift]
            if lhs != rhs:
                raise ShapeError(f'transition square at level {n} does not commute')

    def level(self, n: int) -> Matrix:
        return self.levels[n]
