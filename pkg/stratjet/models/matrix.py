from dataclasses import dataclass
from typing import Any, Iterable, List, Sequence, Tuple

from sympy.polys.matrices import DomainMatrix

from ..errors import DimensionGuardError, NonInvertibleError, ShapeError


@dataclass(frozen=True)
class Matrix:
    """Immutable dense matrix over a sympy domain (a field or a polynomial ring).

    Products, ranks and echelon forms are delegated to ``DomainMatrix``;
    zero-size shapes are handled here.
    """
    rows: Tuple[Tuple[Any, ...], ...]
    shape: Tuple[int, int]
    domain: Any

    max_columns = 20000

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[Any]], domain, ncols: int = None) -> 'Matrix':
        rows = tuple(tuple(domain.convert(x) for x in row) for row in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if any(len(row) != ncols for row in rows):
            raise ShapeError('ragged matrix rows')
        return cls(rows, (len(rows), ncols), domain)

    @classmethod
    def zeros(cls, nrows: int, ncols: int, domain) -> 'Matrix':
        z = domain.zero
        return cls(tuple((z,) * ncols for _ in range(nrows)), (nrows, ncols), domain)

    @classmethod
    def identity(cls, n: int, domain) -> 'Matrix':
        return cls.from_columns([[domain.one if i == j else domain.zero for i in range(n)]
                                 for j in range(n)], domain, n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Any]], domain, nrows: int) -> 'Matrix':
        rows = [[columns[j][i] for j in range(len(columns))] for i in range(nrows)]
        return cls.from_rows(rows, domain, len(columns))

    @classmethod
    def from_entries(cls, entries: dict, nrows: int, ncols: int, domain) -> 'Matrix':
        """Build from a sparse {(i, j): value} map, summing repeated keys"""
        grid = [[domain.zero] * ncols for _ in range(nrows)]
        for (i, j), value in entries.items():
            grid[i][j] = grid[i][j] + value
        return cls(tuple(tuple(r) for r in grid), (nrows, ncols), domain)

    @property
    def nrows(self) -> int:
        return self.shape[0]

    @property
    def ncols(self) -> int:
        return self.shape[1]

    def entry(self, i: int, j: int):
        return self.rows[i][j]

    def column(self, j: int) -> Tuple[Any, ...]:
        return tuple(row[j] for row in self.rows)

    def columns(self) -> List[Tuple[Any, ...]]:
        return [self.column(j) for j in range(self.ncols)]

    def _dm(self) -> DomainMatrix:
        return DomainMatrix([list(r) for r in self.rows], self.shape, self.domain)

    @classmethod
    def _from_dm(cls, dm: DomainMatrix, domain) -> 'Matrix':
        rows = tuple(tuple(r) for r in dm.to_ddm())
        return cls(rows, tuple(dm.shape), domain)

    def __matmul__(self, other: 'Matrix') -> 'Matrix':
        if self.ncols != other.nrows:
            raise ShapeError(f'cannot multiply {self.shape} by {other.shape}')
        if 0 in (self.nrows, self.ncols, other.ncols):
            return Matrix.zeros(self.nrows, other.ncols, self.domain)
        return Matrix._from_dm(self._dm() * other._dm(), self.domain)

    def __add__(self, other: 'Matrix') -> 'Matrix':
        if self.shape != other.shape:
            raise ShapeError(f'cannot add {self.shape} and {other.shape}')
        rows = tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows))
        return Matrix(rows, self.shape, self.domain)

    def __neg__(self) -> 'Matrix':
        return Matrix(tuple(tuple(-a for a in r) for r in self.rows), self.shape, self.domain)

    def __sub__(self, other: 'Matrix') -> 'Matrix':
        return self + (-other)

    def scale(self, c) -> 'Matrix':
        return Matrix(tuple(tuple(a * c for a in r) for r in self.rows), self.shape, self.domain)

    def transpose(self) -> 'Matrix':
        return Matrix.from_columns(self.rows, self.domain, self.ncols) if self.nrows else \
            Matrix.zeros(self.ncols, 0, self.domain)

    def map(self, fn, domain=None) -> 'Matrix':
        domain = domain or self.domain
        return Matrix(tuple(tuple(fn(a) for a in r) for r in self.rows), self.shape, domain)

    def is_zero(self) -> bool:
        return all(not a for r in self.rows for a in r)

    def is_identity(self) -> bool:
        return self.nrows == self.ncols and self == Matrix.identity(self.nrows, self.domain)

    def nonzero_positions(self, limit: int = 10) -> List[Tuple[int, int]]:
        out = []
        for i, r in enumerate(self.rows):
            for j, a in enumerate(r):
                if a:
                    out.append((i, j))
                    if len(out) >= limit:
                        return out
        return out

    def hstack(self, *others: 'Matrix') -> 'Matrix':
        rows = [list(r) for r in self.rows]
        ncols = self.ncols
        for other in others:
            if other.nrows != self.nrows:
                raise ShapeError('hstack row mismatch')
            for r, s in zip(rows, other.rows):
                r.extend(s)
            ncols += other.ncols
        return Matrix(tuple(tuple(r) for r in rows), (self.nrows, ncols), self.domain)

    def vstack(self, *others: 'Matrix') -> 'Matrix':
        rows = list(self.rows)
        for other in others:
            if other.ncols != self.ncols:
                raise ShapeError('vstack column mismatch')
            rows.extend(other.rows)
        return Matrix(tuple(rows), (len(rows), self.ncols), self.domain)

    def kron_identity(self, r: int) -> 'Matrix':
        """self ⊗ I_r, with the rank-r index varying fastest"""
        entries = {}
        for i, row in enumerate(self.rows):
            for j, a in enumerate(row):
                if a:
                    for k in range(r):
                        entries[(i * r + k, j * r + k)] = a
        return Matrix.from_entries(entries, self.nrows * r, self.ncols * r, self.domain)

    @staticmethod
    def block(blocks: Sequence[Sequence['Matrix']], row_sizes: Sequence[int],
              col_sizes: Sequence[int], domain) -> 'Matrix':
        """Assemble a block matrix; ``None`` blocks are zero"""
        entries = {}
        r0 = 0
        for bi, rs in enumerate(row_sizes):
            c0 = 0
            for bj, cs in enumerate(col_sizes):
                blk = blocks[bi][bj]
                if blk is not None:
                    if blk.shape != (rs, cs):
                        raise ShapeError(f'block ({bi},{bj}) has shape {blk.shape}, want {(rs, cs)}')
                    for i, row in enumerate(blk.rows):
                        for j, a in enumerate(row):
                            if a:
                                entries[(r0 + i, c0 + j)] = a
                c0 += cs
            r0 += rs
        return Matrix.from_entries(entries, sum(row_sizes), sum(col_sizes), domain)

    def _guard(self):
        if self.ncols > Matrix.max_columns or self.nrows > Matrix.max_columns:
            raise DimensionGuardError(
                f'matrix of shape {self.shape} exceeds the {Matrix.max_columns} column guard')

    def rref(self):
        """Reduced row echelon form and pivot columns (field domains only)"""
        self._guard()
        if 0 in self.shape:
            return self, ()
        dm, pivots = self._dm().rref()
        return Matrix._from_dm(dm, self.domain), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel(self) -> List[Tuple[Any, ...]]:
        """Basis of the right null space, one vector per free column"""
        reduced, pivots = self.rref()
        K = self.domain
        free = [j for j in range(self.ncols) if j not in pivots]
        basis = []
        for f in free:
            v = [K.zero] * self.ncols
            v[f] = K.one
            for row, p in enumerate(pivots):
                v[p] = -reduced.rows[row][f]
            basis.append(tuple(v))
        return basis

    def det(self):
        if self.nrows != self.ncols:
            raise ShapeError('determinant of a non-square matrix')
        if self.nrows == 0:
            return self.domain.one
        return self._dm().det()

    def inverse(self) -> 'Matrix':
        if self.nrows != self.ncols:
            raise ShapeError('inverse of a non-square matrix')
        n = self.nrows
        reduced, pivots = self.hstack(Matrix.identity(n, self.domain)).rref()
        if pivots[:n] != tuple(range(n)):
            raise NonInvertibleError('matrix is singular')
        return Matrix(tuple(r[n:] for r in reduced.rows), (n, n), self.domain)

    def to_text(self, fmt) -> List[List[str]]:
        return [[fmt(a) for a in r] for r in self.rows]
