from typing import Dict, Sequence

from .base_service import BaseService, timed
from ..errors import EngineError, SectionMismatchError, ShapeError, TruncationError
from ..models.crystal import BMatrix, CrystalFiber, Section, Thickening, ThickeningElement
from ..models.matrix import Matrix
from ..models.poly import multi_binomial, multi_indices, norm, sub, sub_exponents
from ..models.strat import StratModule


def eta_power(eta: Sequence[ThickeningElement], alpha, mode: str) -> ThickeningElement:
    """η^α for plain tables, γ_α(η) = Π γ_{α_j}(η_j) for divided ones"""
    B = eta[0].algebra
    out = B.one()
    for e, a in zip(eta, alpha):
        if a:
            out = out * (e ** a if mode == 'plain' else e.gamma(a))
    return out


class CrystalService(BaseService):
    """Service class for crystal evaluation on nilpotent thickenings"""

    def __init__(self):
        super().__init__('crystal')

    def section(self, thickening: Thickening, images: Sequence) -> Section:
        """Section from ThickeningElements or polynomials in t1..ts"""
        values = tuple(h if isinstance(h, ThickeningElement) else thickening.from_poly(h) for h in images)
        for h in values:
            if h.algebra != thickening:
                raise SectionMismatchError('section image lives in another thickening')
        return Section(thickening, values)

    def evaluate_matrix(self, F: Matrix, h: Section) -> BMatrix:
        """Entries of a polynomial matrix pushed through h"""
        return BMatrix(h.thickening, tuple(tuple(h.evaluate(f) for f in row) for row in F.rows))

    def crystal_evaluate(self, M: StratModule, h: Section) -> CrystalFiber:
        """B ⊗_h L: the fiber of M as a free B-module with the evaluation of its sections"""
        B = h.thickening
        if M.N < B.nu:
            raise TruncationError(f'stratification known to level {M.N}, thickening needs {B.nu}')
        if h.d != M.d:
            raise ShapeError(f'section of dimension {h.d} for a module over A^{M.d}')
        return CrystalFiber(h, M.rank, M.module.ring)

    @timed
    def comparison_iso(self, M: StratModule, h0: Section, h1: Section) -> BMatrix:
        """χ(1 ⊗ e_k) = Σ_α w_α ⊗ h0(column k of M_α), η = h1 − h0"""
        try:
            B = h0.thickening
            self.crystal_evaluate(M, h0)
            eta = h0.difference(h1)
            table = M.table(B.nu)
            r = M.rank
            rows = [[B.zero() for _ in range(r)] for _ in range(r)]
            for alpha in multi_indices(M.d, B.nu):
                X = table.get(alpha)
                if X is None:
                    continue
                w = eta_power(eta, alpha, M.mode)
                if w.is_zero():
                    continue
                for l in range(r):
                    for k in range(r):
                        if X.rows[l][k]:
                            rows[l][k] = rows[l][k] + w * h0.evaluate(X.rows[l][k])
            return BMatrix(B, tuple(tuple(row) for row in rows))
        except EngineError as e:
            self.logger.error(f"Error evaluating comparison isomorphism: {str(e)}")
            raise

    @timed
    def verify_cocycle(self, M: StratModule, h0: Section, h1: Section, h2: Section) -> Dict:
        """χ(h0,h2) = χ(h0,h1)∘χ(h1,h2), χ(h,h) = id and χ(h0,h1)∘χ(h1,h0) = id"""
        chi01 = self.comparison_iso(M, h0, h1)
        chi12 = self.comparison_iso(M, h1, h2)
        chi02 = self.comparison_iso(M, h0, h2)
        composite = chi01 @ chi12
        cocycle = composite == chi02
        identity = all(self.comparison_iso(M, h, h).is_identity() for h in (h0, h1, h2))
        inverse = (chi01 @ self.comparison_iso(M, h1, h0)).is_identity()
        return {
            'pass': cocycle and identity and inverse,
            'cocycle': cocycle,
            'identity': identity,
            'inverse': inverse,
            'mismatches': [list(p) for p in chi02.mismatches(composite)]
        }

    @timed
    def verify_naturality(self, F: Matrix, M: StratModule, N: StratModule, h0: Section, h1: Section) -> Dict:
        """χ_N∘F(h1) = F(h0)∘χ_M for a stratified map F: M -> N"""
        if F.shape != (N.rank, M.rank):
            raise ShapeError(f'map of shape {F.shape} between ranks {M.rank} and {N.rank}')
        lhs = self.comparison_iso(N, h0, h1) @ self.evaluate_matrix(F, h1)
        rhs = self.evaluate_matrix(F, h0) @ self.comparison_iso(M, h0, h1)
        return {'pass': lhs == rhs, 'mismatches': [list(p) for p in lhs.mismatches(rhs)]}

    def induced_comparison_iso(self, rank: int, d: int, h0: Section, h1: Section,
                               source_level: int, target_level: int, mode: str = 'plain') -> BMatrix:
        """Re-expansion ξ^γ ↦ (ξ + η)^γ on P^source ⊗ L, truncated to P^target ⊗ L"""
        B = h0.thickening
        if target_level > source_level:
            raise TruncationError(f'cannot re-expand P^{source_level} into P^{target_level}')
        eta = h0.difference(h1)
        source = multi_indices(d, source_level)
        target = {g: i for i, g in enumerate(multi_indices(d, target_level))}
        rows = [[B.zero() for _ in range(len(source) * rank)] for _ in range(len(target) * rank)]
        for col, gamma in enumerate(source):
            for a in sub_exponents(gamma):
                rest = sub(gamma, a)
                if rest not in target or norm(a) > B.nu:
                    continue
                if mode == 'divided':
                    w = eta_power(eta, a, 'divided')
                else:
                    w = eta_power(eta, a, 'plain').scale(multi_binomial(gamma, a))
                for k in range(rank):
                    i, j = target[rest] * rank + k, col * rank + k
                    rows[i][j] = rows[i][j] + w
        return BMatrix(B, tuple(tuple(row) for row in rows))

    @timed
    def verify_induced_cocycle(self, rank: int, d: int, h0: Section, h1: Section, h2: Section,
                               level: int, mode: str = 'plain') -> Dict:
        """Cocycle of the re-expansion at a fixed level"""
        chi01 = self.induced_comparison_iso(rank, d, h0, h1, level, level, mode)
        chi12 = self.induced_comparison_iso(rank, d, h1, h2, level, level, mode)
        chi02 = self.induced_comparison_iso(rank, d, h0, h2, level, level, mode)
        composite = chi01 @ chi12
        return {'pass': composite == chi02, 'mismatches': [list(p) for p in chi02.mismatches(composite)]}
