from typing import Dict, List, Optional, Sequence, Tuple

from .base_service import BaseService, timed
from ..errors import DimensionMismatchError, EngineError, ShapeError, TruncationError
from ..models.complex import ChainComplex
from ..models.field import ScalarField
from ..models.forms import DifferentialComplex
from ..models.matrix import Matrix
from ..models.module import DiffOperator
from ..models.poly import hasse, index_of, multi_indices


def column_space(M: Matrix) -> List[Tuple]:
    """Basis of the span of the columns of M"""
    if M.ncols == 0 or M.nrows == 0:
        return []
    reduced, pivots = M.transpose().rref()
    return [reduced.rows[i] for i in range(len(pivots))]


def truncated_coordinates(vector: Sequence, d: int, bound: int, field: ScalarField) -> Tuple:
    """k-coordinates of a polynomial vector on the basis (component k, monomial β), β fastest"""
    idx = index_of(d, bound)
    size = len(idx)
    out = [field.zero] * (size * len(vector))
    for k, f in enumerate(vector):
        for monom, c in f.items():
            if monom not in idx:
                raise TruncationError(f'degree {sum(monom)} exceeds the truncation bound {bound}')
            out[k * size + idx[monom]] = c
    return tuple(out)


def klinearize_operator(D: DiffOperator, source_bound: int, target_bound: int) -> Matrix:
    """Exact k-matrix of D from degree <= source_bound to degree <= target_bound coefficients"""
    field = D.source.field
    R = D.source.ring
    monomials = multi_indices(D.d, source_bound)
    columns = []
    for k in range(D.source.rank):
        for beta in monomials:
            vector = [R.zero] * D.source.rank
            vector[k] = R.from_dict({beta: field.one})
            columns.append(truncated_coordinates(D.apply(vector), D.d, target_bound, field))
    nrows = D.target.rank * len(multi_indices(D.d, target_bound))
    return Matrix.from_columns(columns, field.domain, nrows)


class ExactCoreService(BaseService):
    """Service class for Hasse derivatives and exact homological linear algebra"""

    def __init__(self):
        super().__init__('exactcore')

    def hasse_derivative(self, f, alpha: Sequence[int]):
        """Coefficient of t^α in f(x + t)"""
        try:
            if any(a < 0 for a in alpha):
                raise ShapeError(f'exponent {tuple(alpha)} has a negative entry')
            return hasse(f, alpha)
        except EngineError as e:
            self.logger.error(f"Error computing Hasse derivative: {str(e)}")
            raise

    @timed
    def complex_homology_ranks(self, C: ChainComplex) -> List[int]:
        """dim ker M_i − rank M_{i−1} at each position"""
        ranks = [M.rank() for M in C.matrices]
        out = []
        for i, r in enumerate(C.ranks):
            outgoing = ranks[i] if i < len(ranks) else 0
            incoming = ranks[i - 1] if i > 0 else 0
            out.append(r - outgoing - incoming)
        self.logger.debug(f'homology of {C.name or "complex"}: {out}')
        return out

    @timed
    def check_homotopy_identity(self, C: ChainComplex) -> Dict:
        """Check s_{i+1}·M_i + M_{i−1}·s_i = id at every position"""
        if C.homotopy is None:
            raise ShapeError(f'{C.name or "complex"} carries no homotopy')
        K = C.domain
        positions = []
        for i, r in enumerate(C.ranks):
            total = Matrix.zeros(r, r, K)
            if i < len(C.matrices):
                total = total + C.homotopy[i + 1] @ C.matrices[i]
            if i > 0:
                total = total + C.matrices[i - 1] @ C.homotopy[i]
            delta = total - Matrix.identity(r, K)
            positions.append({
                'position': i,
                'pass': delta.is_zero(),
                'mismatches': [list(p) for p in delta.nonzero_positions()]
            })
        return {'pass': all(p['pass'] for p in positions), 'positions': positions}

    @timed
    def stable_kernel(self, kernels: Sequence[Matrix], transitions: Sequence[Matrix], probe: int,
                      margin: int = 1, target_transitions: Optional[Sequence[Matrix]] = None) -> Dict:
        """Image in ker K_probe of ker K_{probe+margin}, with a stabilization certificate.

        ``transitions[n]`` maps level n+1 to level n of the source tower;
        ``target_transitions[n]`` does the same for the target tower, when given.
        """
        top = len(kernels) - 1
        if len(transitions) < top:
            raise ShapeError(f'{len(kernels)} levels need {top} transitions')
        if probe + margin > top:
            raise ShapeError(f'probe level {probe} + margin {margin} exceeds the top level {top}')
        if target_transitions is not None:
            for n in range(top):
                if target_transitions[n] @ kernels[n + 1] != kernels[n] @ transitions[n]:
                    raise ShapeError(f'transition square at level {n} does not commute')

        def pushed(level: int) -> List[Tuple]:
            K = kernels[level]
            basis = K.kernel()
            if not basis:
                return []
            down = Matrix.from_columns(basis, K.domain, K.ncols)
            for n in range(level - 1, probe - 1, -1):
                down = transitions[n] @ down
            return column_space(down)

        image = pushed(probe + margin)
        for v in image:
            w = kernels[probe] @ Matrix.from_columns([v], kernels[probe].domain, len(v))
            if not w.is_zero():
                raise ShapeError('transition maps do not carry kernels into kernels')
        dimensions = [len(image)]
        if probe + margin + 1 <= top:
            dimensions.append(len(pushed(probe + margin + 1)))
            stabilized = dimensions[0] == dimensions[1]
        else:
            stabilized = False
        if not stabilized:
            self.logger.warning(f'stable kernel at level {probe} not certified: dimensions {dimensions}')
        return {'basis': image, 'dimension': len(image), 'stabilized': stabilized, 'dimensions': dimensions}

    @timed
    def klinearize(self, F: DifferentialComplex, bound: int) -> ChainComplex:
        """k-linear complex of F^i with coefficient degrees <= D_i, D_{i+1} = D_i + growth(d^i)"""
        try:
            bounds = [bound]
            for D in F.operators:
                bounds.append(bounds[-1] + D.degree_growth())
            mats = tuple(klinearize_operator(D, bounds[i], bounds[i + 1]) for i, D in enumerate(F.operators))
            ranks = tuple(F.modules[i].rank * len(multi_indices(F.d, b)) for i, b in enumerate(bounds))
            return ChainComplex(ranks, mats, F.field, None, f'{F.name or "complex"}<={bound}')
        except EngineError as e:
            self.logger.error(f"Error linearizing complex over k: {str(e)}")
            raise

    def change_of_basis(self, C: ChainComplex, position: int, P: Matrix) -> ChainComplex:
        """Conjugate C^position by an invertible P"""
        if P.shape != (C.ranks[position], C.ranks[position]):
            raise DimensionMismatchError(f'change of basis of shape {P.shape} at position {position}')
        return C.conjugate(position, P)
