from dataclasses import dataclass
from typing import Optional, Tuple

from ..errors import ComplexError, ShapeError
from .field import ScalarField
from .matrix import Matrix


@dataclass(frozen=True)
class ChainComplex:
    """Finite cochain complex C^0 -> ... -> C^L of free k-modules.

    ``matrices[i]`` is M_i: C^i -> C^{i+1} with shape (r_{i+1}, r_i).
    ``homotopy[i]`` is s_i: C^i -> C^{i-1} (s_0 has shape (0, r_0)).
    """
    ranks: Tuple[int, ...]
    matrices: Tuple[Matrix, ...]
    field: ScalarField
    homotopy: Optional[Tuple[Matrix, ...]] = None
    name: str = ''

    def __post_init__(self):
        if len(self.matrices) != max(len(self.ranks) - 1, 0):
            raise ShapeError(f'{len(self.ranks)} positions need {len(self.ranks) - 1} matrices')
        for i, M in enumerate(self.matrices):
            if M.shape != (self.ranks[i + 1], self.ranks[i]):
                raise ShapeError(
                    f'M_{i} has shape {M.shape}, want {(self.ranks[i + 1], self.ranks[i])}')
        for i in range(len(self.matrices) - 1):
            if not (self.matrices[i + 1] @ self.matrices[i]).is_zero():
                raise ComplexError(f'M_{i + 1}·M_{i} != 0 in {self.name or "complex"}')
        if self.homotopy is not None:
            if len(self.homotopy) != len(self.ranks):
                raise ShapeError('homotopy needs one map per position')
            for i, s in enumerate(self.homotopy):
                want = (self.ranks[i - 1] if i > 0 else 0, self.ranks[i])
                if s.shape != want:
                    raise ShapeError(f's_{i} has shape {s.shape}, want {want}')

    @property
    def length(self) -> int:
        return len(self.ranks)

    @property
    def domain(self):
        return self.field.domain

    def with_homotopy(self, homotopy) -> 'ChainComplex':
        return ChainComplex(self.ranks, self.matrices, self.field, tuple(homotopy), self.name)

    def tensor_rank(self, r: int, name: str = '') -> 'ChainComplex':
        """C ⊗ k^r with the homotopy transported as s ⊗ id"""
        homotopy = None
        if self.homotopy is not None:
            homotopy = tuple(s.kron_identity(r) for s in self.homotopy)
        return ChainComplex(tuple(n * r for n in self.ranks),
                            tuple(M.kron_identity(r) for M in self.matrices),
                            self.field, homotopy, name or self.name)

    def conjugate(self, position: int, P: Matrix) -> 'ChainComplex':
        """Change basis of C^position by the invertible P, adjusting the adjacent matrices"""
        Pinv = P.inverse()
        mats = list(self.matrices)
        if position < len(mats):
            mats[position] = mats[position] @ Pinv
        if position > 0:
            mats[position - 1] = P @ mats[position - 1]
        return ChainComplex(self.ranks, tuple(mats), self.field, None, self.name)
