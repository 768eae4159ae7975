from dataclasses import dataclass
from math import comb
from typing import Dict, Optional, Tuple

from ..errors import DimensionMismatchError, ShapeError
from .field import ScalarField
from .jet import MODES
from .matrix import Matrix
from .module import FreeModule
from .poly import Exponent, multi_indices, norm, poly_ring

Table = Tuple[Tuple[Exponent, Matrix], ...]


def _poly_matrix(R, rows) -> Matrix:
    return Matrix.from_rows([[R(c) for c in row] for row in rows], R.to_domain(), len(rows[0]) if rows else 0)


@dataclass(frozen=True)
class Connection:
    """∇_j = ∂_j + A_j on the free module O^r; one r×r polynomial matrix per variable"""
    d: int
    rank: int
    matrices: Tuple[Matrix, ...]
    field: ScalarField = ScalarField(0)
    name: str = ''

    def __post_init__(self):
        if len(self.matrices) != self.d:
            raise DimensionMismatchError(f'a connection on A^{self.d} needs {self.d} matrices')
        for A in self.matrices:
            if A.shape != (self.rank, self.rank):
                raise ShapeError(f'connection matrix of shape {A.shape} on a rank-{self.rank} module')

    @property
    def ring(self):
        return poly_ring(self.d, self.field.characteristic)

    @property
    def module(self) -> FreeModule:
        return FreeModule(self.d, self.rank, self.field)

    def A(self, j: int) -> Matrix:
        """Matrix of the j-th variable, 1-based"""
        return self.matrices[j - 1]

    @classmethod
    def from_rows(cls, d: int, rows_per_variable, field: ScalarField = ScalarField(0),
                  name: str = '') -> 'Connection':
        R = poly_ring(d, field.characteristic)
        mats = tuple(_poly_matrix(R, rows) for rows in rows_per_variable)
        rank = mats[0].nrows if mats else 0
        return cls(d, rank, mats, field, name)

    @classmethod
    def trivial(cls, d: int = 1, rank: int = 1, field: ScalarField = ScalarField(0)) -> 'Connection':
        R = poly_ring(d, field.characteristic)
        zero = Matrix.zeros(rank, rank, R.to_domain())
        return cls(d, rank, (zero,) * d, field, f'trivial-d{d}-r{rank}')

    @classmethod
    def nilpotent(cls, field: ScalarField = ScalarField(0)) -> 'Connection':
        """d=1, rank 2, A = [[0,1],[0,0]]"""
        return cls.from_rows(1, [[[0, 1], [0, 0]]], field, 'nilpotent')

    @classmethod
    def constant_twist(cls, c=3, field: ScalarField = ScalarField(0)) -> 'Connection':
        """d=1, rank 1, A = c"""
        return cls.from_rows(1, [[[field.convert(c)]]], field, f'twist-{c}')

    @classmethod
    def plane_unipotent(cls, field: ScalarField = ScalarField(0)) -> 'Connection':
        """d=2, rank 2, ∇ = d + d(x1*x2)·N with N = [[0,1],[0,0]]"""
        R = poly_ring(2, field.characteristic)
        x1, x2 = R.gens
        return cls.from_rows(2, [[[0, x2], [0, 0]], [[0, x1], [0, 0]]], field, 'plane-unipotent')

    @classmethod
    def plane_curved(cls, field: ScalarField = ScalarField(0)) -> 'Connection':
        """d=2, rank 1, A_1 = x2, A_2 = 0; not flat"""
        R = poly_ring(2, field.characteristic)
        return cls.from_rows(2, [[[R.gens[1]]], [[0]]], field, 'plane-curved')

    def __repr__(self):
        return f'<Connection {self.name or "?"} d={self.d} r={self.rank} {self.field.name}>'


@dataclass(frozen=True)
class StratModule:
    """A free module L with stratification tables s'_n, 0 <= n <= N.

    ``levels[n]`` is the table of s'_n: s'_n(e_k) = Σ_α ξ^α ⊗ (column k of the α-matrix),
    coefficients normalized on the left. Levels are stored separately and their
    compatibility is checked by verify_stratification.
    """
    module: FreeModule
    levels: Tuple[Table, ...]
    mode: str = 'plain'
    name: str = ''

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f'unknown jet mode {self.mode!r}')
        r = self.module.rank
        for n, table in enumerate(self.levels):
            for alpha, M in table:
                if len(alpha) != self.module.d:
                    raise DimensionMismatchError(f'exponent {alpha} does not match d={self.module.d}')
                if norm(alpha) > n:
                    raise ShapeError(f'exponent {alpha} exceeds level {n}')
                if M.shape != (r, r):
                    raise ShapeError(f'stratification matrix of shape {M.shape} on rank {r}')

    @classmethod
    def build(cls, module: FreeModule, tables, mode: str = 'plain', name: str = '') -> 'StratModule':
        """Normalize per-level dicts {α: Matrix}, dropping zero matrices"""
        levels = []
        for n, table in enumerate(tables):
            order = {a: i for i, a in enumerate(multi_indices(module.d, n))}
            kept = sorted(((tuple(a), M) for a, M in table.items() if not M.is_zero()),
                          key=lambda t: order.get(t[0], len(order)))
            levels.append(tuple(kept))
        return cls(module, tuple(levels), mode, name)

    @property
    def N(self) -> int:
        return len(self.levels) - 1

    @property
    def d(self) -> int:
        return self.module.d

    @property
    def rank(self) -> int:
        return self.module.rank

    @property
    def field(self) -> ScalarField:
        return self.module.field

    def table(self, n: int) -> Dict[Exponent, Matrix]:
        return dict(self.levels[n])

    def matrix(self, n: int, alpha) -> Matrix:
        return self.table(n).get(tuple(alpha)) or Matrix.zeros(
            self.rank, self.rank, self.module.poly_domain)

    def truncated(self, N: int) -> 'StratModule':
        return StratModule(self.module, self.levels[:N + 1], self.mode, self.name)

    def with_level(self, n: int, table: Dict[Exponent, Matrix]) -> 'StratModule':
        tables = [self.table(k) for k in range(len(self.levels))]
        tables[n] = table
        return StratModule.build(self.module, tables, self.mode, self.name)

    def __repr__(self):
        return f'<StratModule {self.name or "?"} d={self.d} r={self.rank} N={self.N} {self.mode}>'


@dataclass(frozen=True)
class InducedTower:
    """The tower {P^n ⊗ L}_{n <= N} with the comultiplication stratification"""
    generator: FreeModule
    N: int
    mode: str = 'plain'

    @property
    def d(self) -> int:
        return self.generator.d

    def level_rank(self, n: int) -> int:
        if n < 0:
            return 0
        return comb(n + self.d, self.d) * self.generator.rank

    def level_module(self, n: int) -> FreeModule:
        return FreeModule(self.d, self.level_rank(n), self.generator.field)

    def level_basis(self, n: int) -> Tuple[Tuple[Exponent, int], ...]:
        """(γ, k) pairs, k varying fastest"""
        if n < 0:
            return ()
        return tuple((g, k) for g in multi_indices(self.d, n) for k in range(self.generator.rank))


@dataclass(frozen=True)
class HorizontalSections:
    """Basis of horizontal elements found at a coefficient degree bound"""
    basis: Tuple[Tuple, ...]
    degree_bound: int
    stabilized: bool
    dimensions: Tuple[int, ...] = ()
    probe_level: Optional[int] = None

    @property
    def dimension(self) -> int:
        return len(self.basis)
