from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .base_service import BaseService, timed
from ..errors import DimensionMismatchError, EngineError, OrderError, ShapeError
from ..models.forms import DifferentialComplex
from ..models.matrix import Matrix
from ..models.module import DiffOperator, FreeModule, ProMap, TruncatedTower
from ..models.poly import (
    add, hasse, index_of, monomial, multi_binomial, multi_factorial, multi_indices, norm, sub, sub_exponents,
    substitute_linear, unit_vector)


def vector_matrix(vectors: Sequence[Sequence], module: FreeModule) -> Matrix:
    """Columns are the given polynomial vectors"""
    return Matrix.from_columns([tuple(v) for v in vectors], module.poly_domain, module.rank)


def truncation_matrix(d: int, source_level: int, target_level: int, rank: int, domain) -> Matrix:
    """q ⊗ id_L: P^source ⊗ L -> P^target ⊗ L on the (γ, k) basis"""
    target = index_of(d, target_level)
    entries = {}
    for j, gamma in enumerate(multi_indices(d, source_level)):
        if gamma in target:
            for k in range(rank):
                entries[(target[gamma] * rank + k, j * rank + k)] = domain.one
    return Matrix.from_entries(entries, len(target) * rank, len(multi_indices(d, source_level)) * rank, domain)


def jet_module(module: FreeModule, level: int) -> FreeModule:
    """P^level ⊗ L as a free module"""
    return FreeModule(module.d, len(multi_indices(module.d, level)) * module.rank, module.field)


class DiffOpService(BaseService):
    """Service class for differential operators in bar form"""

    def __init__(self):
        super().__init__('diffop')

    def apply(self, D: DiffOperator, s) -> Tuple:
        """D(f·e) = Σ_α H_α(f)·D̄(ξ^α ⊗ e)"""
        try:
            return D.apply(s)
        except EngineError as e:
            self.logger.error(f"Error applying operator: {str(e)}")
            raise

    def compose(self, D2: DiffOperator, D1: DiffOperator) -> DiffOperator:
        """Bar table of D2∘D1 through δ^{r1+r2, r1}"""
        if D1.target != D2.source:
            raise DimensionMismatchError('operators are not composable')
        R = D1.source.ring
        r1, r2 = D1.effective_order, D2.effective_order
        bar1, bar2 = D1.table(), D2.table()
        rows, cols = D2.target.rank, D1.source.rank
        table = {}
        for gamma in multi_indices(D1.d, r1 + r2):
            entries = {}
            for a in sub_exponents(gamma):
                b = sub(gamma, a)
                if norm(a) > r2 or b not in bar1:
                    continue
                binom = multi_binomial(gamma, a)
                B1 = bar1[b]
                for j in range(D1.target.rank):
                    for k in range(cols):
                        g = B1.rows[j][k]
                        if not g:
                            continue
                        for c in multi_indices(D1.d, r2 - norm(a)):
                            B2 = bar2.get(add(a, c))
                            if B2 is None:
                                continue
                            h = hasse(g, c)
                            if not h:
                                continue
                            for row in range(rows):
                                x = B2.rows[row][j]
                                if x:
                                    entries[(row, k)] = entries.get((row, k), R.zero) + x * h * binom
            if entries:
                table[gamma] = Matrix.from_entries(entries, rows, cols, D1.source.poly_domain)
        return DiffOperator.from_table(D1.source, D2.target, table, D1.order + D2.order)

    def extract_order1_parts(self, D: DiffOperator) -> Tuple[Matrix, List[Matrix]]:
        """(d_F, [d_{x_j}]) = (D̄(𝕀 ⊗ ·), [D̄(ξ_j ⊗ ·)])"""
        if D.effective_order > 1:
            raise OrderError(f'operator of order {D.effective_order} has no order-1 parts')
        return D.matrix((0,) * D.d), [D.matrix(unit_vector(D.d, j)) for j in range(D.d)]

    def assemble_order1(self, source: FreeModule, target: FreeModule, d_F: Matrix,
                        d_x: Sequence[Matrix]) -> DiffOperator:
        if len(d_x) != source.d:
            raise DimensionMismatchError(f'{len(d_x)} partial maps for d={source.d}')
        table = {(0,) * source.d: d_F}
        for j, X in enumerate(d_x):
            table[unit_vector(source.d, j)] = X
        return DiffOperator.from_table(source, target, table, 1)

    @timed
    def verify_order1_relations(self, F: DifferentialComplex) -> Dict:
        """Check d_F² = 0, d_{x_j}d_F + d_F d_{x_j} = 0, d_{x_j}d_{x_k} + d_{x_k}d_{x_j} = 0 and d_{x_j}² = 0"""
        degrees = []
        for i in range(len(F.operators) - 1):
            D1, D2 = F.operators[i], F.operators[i + 1]
            dF1, X1 = self.extract_order1_parts(D1)
            dF2, X2 = self.extract_order1_parts(D2)
            rank = D1.source.rank
            failures = []

            first = [D2.apply(D1.apply(D1.source.basis_vector(k))) for k in range(rank)]
            if any(any(c for c in v) for v in first):
                failures.append({'relation': 'i'})
            for j in range(F.d):
                columns = []
                for k in range(rank):
                    v = D2.apply(X1[j].column(k))
                    w = (X2[j] @ Matrix.from_columns([dF1.column(k)], dF1.domain, dF1.nrows)).column(0)
                    columns.append(tuple(a + b for a, b in zip(v, w)))
                if any(any(c for c in v) for v in columns):
                    failures.append({'relation': 'ii', 'j': j + 1})
                for k in range(j + 1, F.d):
                    if not (X2[j] @ X1[k] + X2[k] @ X1[j]).is_zero():
                        failures.append({'relation': 'iii', 'j': j + 1, 'k': k + 1})
                if not (X2[j] @ X1[j]).is_zero():
                    failures.append({'relation': 'iv', 'j': j + 1})
            composite_vanishes = self.compose(D2, D1).is_zero()
            degrees.append({
                'degree': i,
                'pass': not failures,
                'failures': failures,
                'composite_vanishes': composite_vanishes
            })
        return {'pass': all(d['pass'] for d in degrees), 'degrees': degrees}

    def linearize(self, D: DiffOperator, n: int, shift: Optional[int] = None, mode: str = 'plain') -> Matrix:
        """Q⁰(D)_n = (id ⊗ D̄)∘(δ ⊗ id): P^{n+shift} ⊗ L -> P^n ⊗ L', in the ξ^α or ξ^[α] basis"""
        if n < 0:
            raise OrderError(f'level must be >= 0, got {n}')
        shift = D.effective_order if shift is None else shift
        if shift < D.effective_order:
            raise OrderError(f'shift {shift} is below the operator order {D.effective_order}')
        d = D.d
        R = D.source.ring
        field = D.source.field
        r, rp = D.source.rank, D.target.rank
        target = index_of(d, n)
        bar = D.table()
        if mode == 'divided':
            # D̄(ξ^[b] ⊗ e) = D̄(ξ^b ⊗ e)/b!
            bar = {b: M.scale(field.inverse_int(multi_factorial(b))) for b, M in bar.items()}
        entries = {}
        for col, gamma in enumerate(multi_indices(d, n + shift)):
            for a in sub_exponents(gamma):
                b = sub(gamma, a)
                if norm(a) > n or b not in bar:
                    continue
                binom = multi_binomial(gamma, a) if mode == 'plain' else 1
                M = bar[b]
                for j in range(rp):
                    for k in range(r):
                        g = M.rows[j][k]
                        if not g:
                            continue
                        for c in multi_indices(d, n - norm(a)):
                            h = hasse(g, c)
                            if h and mode == 'divided':
                                # ξ^[a]·c!·ξ^[c] = c!·C(a+c, a)·ξ^[a+c]
                                h = h * (multi_factorial(c) * multi_binomial(add(a, c), a))
                            if h:
                                key = (target[add(a, c)] * rp + j, col * r + k)
                                entries[key] = entries.get(key, R.zero) + h * binom
        return Matrix.from_entries(entries, len(target) * rp, len(multi_indices(d, n + shift)) * r,
                                   D.source.poly_domain)

    def counit_collapse(self, D: DiffOperator, shift: Optional[int] = None) -> DiffOperator:
        """Read the bar table back off Q⁰(D)_0: column (γ, k) is D̄(ξ^γ ⊗ e_k)"""
        shift = D.effective_order if shift is None else shift
        Q = self.linearize(D, 0, shift)
        r = D.source.rank
        table = {}
        for col, gamma in enumerate(multi_indices(D.d, shift)):
            columns = [Q.column(col * r + k) for k in range(r)]
            table[gamma] = Matrix.from_columns(columns, D.source.poly_domain, D.target.rank)
        return DiffOperator.from_table(D.source, D.target, table, D.declared_order)

    @timed
    def verify_functoriality(self, D2: DiffOperator, D1: DiffOperator, levels: int) -> Dict:
        """Q⁰(D2∘D1)_n = Q⁰(D2)_n ∘ Q⁰(D1)_{n+s2} for n <= levels, and the counit collapse recovers D"""
        composite = self.compose(D2, D1)
        s1, s2 = D1.effective_order, D2.effective_order
        failed = []
        for n in range(levels + 1):
            lhs = self.linearize(composite, n, s1 + s2)
            rhs = self.linearize(D2, n, s2) @ self.linearize(D1, n + s2, s1)
            if lhs != rhs:
                failed.append({'level': n, 'positions': [list(p) for p in (lhs - rhs).nonzero_positions()]})
        collapse = all(self.counit_collapse(D).table() == D.table() for D in (D1, D2, composite))
        return {'pass': not failed and collapse, 'failed_levels': failed, 'counit_collapse': collapse}

    def jet_tower(self, module: FreeModule, N: int) -> TruncatedTower:
        """{P^n ⊗ L}_{n <= N} with truncation transitions"""
        mods = tuple(jet_module(module, n) for n in range(N + 1))
        trans = tuple(truncation_matrix(module.d, n + 1, n, module.rank, module.poly_domain) for n in range(N))
        return TruncatedTower(mods, trans)

    @timed
    def linearize_promap(self, D: DiffOperator, N: int, shift: Optional[int] = None) -> ProMap:
        """Q⁰(D) on levels 0..N as a morphism of truncated towers"""
        shift = D.effective_order if shift is None else shift
        levels = tuple(self.linearize(D, n, shift) for n in range(N + 1))
        return ProMap(self.jet_tower(D.source, N + shift), self.jet_tower(D.target, N), shift, levels)

    def from_action(self, apply_fn: Callable, source: FreeModule, target: FreeModule,
                    order: int) -> DiffOperator:
        """Recover the bar from the action: D̄(ξ^γ ⊗ e) = Σ_{β<=γ} C(γ,β)(−x)^{γ−β} D(x^β e)"""
        R = source.ring
        table = {}
        for gamma in multi_indices(source.d, order):
            columns = []
            for k in range(source.rank):
                acc = [R.zero] * target.rank
                for beta in sub_exponents(gamma):
                    rest = sub(gamma, beta)
                    sign = -1 if norm(rest) % 2 else 1
                    factor = monomial(R, rest) * (sign * multi_binomial(gamma, beta))
                    e = [R.zero] * source.rank
                    e[k] = monomial(R, beta)
                    image = target.vector(apply_fn(tuple(e)))
                    acc = [x + factor * y for x, y in zip(acc, image)]
                columns.append(tuple(acc))
            table[gamma] = vector_matrix(columns, target)
        return DiffOperator.from_table(source, target, table, order)

    def change_coordinates(self, D: DiffOperator, G) -> DiffOperator:
        """σ∘D∘σ⁻¹ with σ(f)(x) = f(Gx)"""
        field = D.source.field
        Gm = Matrix.from_rows(G, field.domain)
        if Gm.nrows != D.d or Gm.ncols != D.d:
            raise ShapeError(f'change of variables must be {D.d}x{D.d}')
        Ginv = Gm.inverse().rows

        def action(s):
            pulled = tuple(substitute_linear(f, Ginv) for f in s)
            return tuple(substitute_linear(f, Gm.rows) for f in D.apply(pulled))

        return self.from_action(action, D.source, D.target, D.order)

    def promap_equal(self, g: ProMap, h: ProMap) -> bool:
        """Equality after composing both down to the larger shift"""
        if g.target != h.target:
            return False
        shift = max(g.shift, h.shift)
        levels = min(len(g.levels), len(h.levels))
        for n in range(levels):
            top = n + shift
            if top > g.source.top or top > h.source.top:
                break
            lhs = g.level(n) @ g.source.down(top, n + g.shift)
            rhs = h.level(n) @ h.source.down(top, n + h.shift)
            if lhs != rhs:
                return False
        return True
