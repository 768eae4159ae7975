from math import comb
from typing import Dict, List, Tuple, Union

from .base_service import BaseService, timed
from .diffop_service import truncation_matrix
from .exactcore_service import ExactCoreService
from .jet_service import split_terms
from ..errors import EngineError, FlatnessError, NonInvertibleError, OrderError, ShapeError, StratificationError
from ..models.field import ScalarField
from ..models.jet import JetAlgebra
from ..models.matrix import Matrix
from ..models.module import FreeModule
from ..models.poly import (
    Exponent, add, hasse, index_of, multi_binomial, multi_factorial, multi_indices, norm, sub,
    sub_exponents, unit_vector)
from ..models.strat import Connection, HorizontalSections, InducedTower, StratModule


def derivative_matrix(M: Matrix, alpha: Exponent) -> Matrix:
    """Entrywise Hasse derivative H_α"""
    return M.map(lambda f: hasse(f, alpha))


def covariant(conn: Connection, j: int, v):
    """∇_j v = ∂_j v + A_j v for a polynomial column vector v (j 0-based)"""
    e = unit_vector(conn.d, j)
    A = conn.matrices[j]
    out = []
    for row in range(conn.rank):
        acc = hasse(v[row], e)
        for k in range(conn.rank):
            if A.rows[row][k] and v[k]:
                acc = acc + A.rows[row][k] * v[k]
        out.append(acc)
    return tuple(out)


class StratService(BaseService):
    """Service class for stratified modules and induced towers"""

    def __init__(self, exactcore: ExactCoreService = None):
        super().__init__('strat')
        self.exactcore = exactcore or ExactCoreService()

    def flatness_check(self, conn: Connection) -> Dict:
        """∂_i A_j − ∂_j A_i + [A_i, A_j] = 0 for all i < j"""
        for i in range(conn.d):
            for j in range(i + 1, conn.d):
                Ai, Aj = conn.matrices[i], conn.matrices[j]
                curvature = (derivative_matrix(Aj, unit_vector(conn.d, i))
                             - derivative_matrix(Ai, unit_vector(conn.d, j))
                             + Ai @ Aj - Aj @ Ai)
                if not curvature.is_zero():
                    return {'pass': False, 'offending': [i + 1, j + 1],
                            'positions': [list(p) for p in curvature.nonzero_positions()]}
        return {'pass': True, 'offending': None, 'positions': []}

    @timed
    def taylor_stratification(self, conn: Connection, N: int, mode: str = 'plain') -> StratModule:
        """s'_n(e) = Σ ξ^α ⊗ ∇^α(e)/α! (plain) or Σ ξ^[α] ⊗ ∇^α(e) (divided)"""
        try:
            flat = self.flatness_check(conn)
            if not flat['pass']:
                raise FlatnessError(f'connection is not flat at pair {flat["offending"]}',
                                    payload={'offending': flat['offending']})
            field = conn.field
            module = conn.module
            # ∇^α e_k, built from ∇^{α − e_j} with j the first nonzero index
            powers = {(0,) * conn.d: [module.basis_vector(k) for k in range(conn.rank)]}
            for alpha in multi_indices(conn.d, N):
                if alpha in powers:
                    continue
                j = next(i for i, a in enumerate(alpha) if a)
                prev = powers[sub(alpha, unit_vector(conn.d, j))]
                powers[alpha] = [covariant(conn, j, v) for v in prev]
            tables = {}
            for alpha in multi_indices(conn.d, N):
                scale = field.one
                if mode == 'plain':
                    fact = multi_factorial(alpha)
                    if field.is_zero_int(fact):
                        raise NonInvertibleError(
                            f'{alpha}! vanishes in {field.name}; use the divided mode')
                    scale = field.inverse_int(fact)
                columns = [tuple(c * scale for c in v) for v in powers[alpha]]
                tables[alpha] = Matrix.from_columns(columns, module.poly_domain, conn.rank)
            levels = [{a: M for a, M in tables.items() if norm(a) <= n} for n in range(N + 1)]
            return StratModule.build(module, levels, mode, conn.name)
        except EngineError as e:
            self.logger.error(f"Error building Taylor stratification: {str(e)}")
            raise

    def _coassociativity_defects(self, M: StratModule, m: int, n: int) -> List[Dict]:
        """Compare δ(s'_{m+n}) with s'_m applied semilinearly to s'_n, entry by entry"""
        field = M.field
        defects = []
        for a in multi_indices(M.d, m):
            for b in multi_indices(M.d, n):
                top = M.matrix(m + n, add(a, b))
                lhs = top.scale(multi_binomial(add(a, b), a)) if M.mode == 'plain' else top
                rhs = Matrix.zeros(M.rank, M.rank, M.module.poly_domain)
                Mb = M.matrix(n, b)
                for c in sub_exponents(a):
                    Hc = derivative_matrix(Mb, c)
                    if M.mode == 'divided':
                        Hc = Hc.scale(field.integer(multi_binomial(a, c) * multi_factorial(c)))
                    rhs = rhs + M.matrix(m, sub(a, c)) @ Hc
                if lhs != rhs:
                    defects.append({'m': m, 'n': n, 'a': list(a), 'b': list(b),
                                    'positions': [list(p) for p in (lhs - rhs).nonzero_positions()]})
        return defects

    @timed
    def verify_stratification(self, M: StratModule) -> Dict:
        """Co-identity, truncation compatibility and co-associativity"""
        identity = Matrix.identity(M.rank, M.module.poly_domain)
        zero = (0,) * M.d
        co_identity = [n for n in range(M.N + 1) if M.matrix(n, zero) != identity]
        compatibility = []
        for n in range(M.N):
            upper = {a: X for a, X in M.table(n + 1).items() if norm(a) <= n}
            if upper != M.table(n):
                compatibility.append(n)
        coassoc = []
        for total in range(M.N + 1):
            for m in range(total + 1):
                coassoc.extend(self._coassociativity_defects(M, m, total - m))
        result = {
            'co_identity': {'pass': not co_identity, 'failed_levels': co_identity},
            'compatibility': {'pass': not compatibility, 'failed_levels': compatibility},
            'co_associativity': {'pass': not coassoc, 'defects': coassoc[:10]}
        }
        result['pass'] = all(v['pass'] for v in result.values())
        return result

    def induced_stratification(self, L: FreeModule, N: int, mode: str = 'plain') -> InducedTower:
        return InducedTower(L, N, mode)

    def induced_level_map(self, tower: InducedTower, n: int, m: int) -> Matrix:
        """δ ⊗ id_L: P^{m+n} ⊗ L -> P^n ⊗ P^m ⊗ L on the (a, b, k) basis"""
        d, r = tower.d, tower.generator.rank
        K = tower.generator.field.domain
        rows_a, rows_b = index_of(d, n), index_of(d, m)
        entries = {}
        for col, gamma in enumerate(multi_indices(d, m + n)):
            for a, b, factor in split_terms(gamma, m, m + n, tower.mode):
                row = (rows_a[a] * len(rows_b) + rows_b[b]) * r
                for k in range(r):
                    entries[(row + k, col * r + k)] = K.convert(factor)
        return Matrix.from_entries(entries, len(rows_a) * len(rows_b) * r,
                                   len(multi_indices(d, m + n)) * r, K)

    @timed
    def verify_induced_stratification(self, tower: InducedTower) -> Dict:
        """Co-identity and co-associativity of δ on every level of the tower"""
        K = tower.generator.field.domain
        co_identity, coassoc = [], []
        for total in range(tower.N + 1):
            delta = self.induced_level_map(tower, 0, total)
            if delta != Matrix.identity(delta.nrows, K):
                co_identity.append(total)
            for n in range(total + 1):
                for q in range(total - n + 1):
                    m = total - n - q
                    # (δ ⊗ id)∘δ versus (id ⊗ δ)∘δ, both landing in P^n ⊗ P^q ⊗ P^m ⊗ L
                    left = self._split_first(tower, n, q, m) @ self.induced_level_map(tower, n + q, m)
                    right = self._split_second(tower, n, q, m) @ self.induced_level_map(tower, n, q + m)
                    if left != right:
                        coassoc.append([n, q, m])
        result = {
            'co_identity': {'pass': not co_identity, 'failed_levels': co_identity},
            'co_associativity': {'pass': not coassoc, 'failed_splits': coassoc}
        }
        result['pass'] = all(v['pass'] for v in result.values())
        return result

    def _split_first(self, tower: InducedTower, n: int, q: int, m: int) -> Matrix:
        """δ^{n+q, q} ⊗ id_{P^m ⊗ L}"""
        inner = len(multi_indices(tower.d, m)) * tower.generator.rank
        return self.induced_level_map(InducedTower(FreeModule(tower.d, 1, tower.generator.field), tower.N,
                                                   tower.mode), n, q).kron_identity(inner)

    def _split_second(self, tower: InducedTower, n: int, q: int, m: int) -> Matrix:
        """id_{P^n} ⊗ δ^{q+m, m} ⊗ id_L"""
        block = self.induced_level_map(tower, q, m)
        count = len(multi_indices(tower.d, n))
        sizes_r = [block.nrows] * count
        sizes_c = [block.ncols] * count
        blocks = [[block if i == j else None for j in range(count)] for i in range(count)]
        return Matrix.block(blocks, sizes_r, sizes_c, block.domain)

    def extract_connection(self, M: StratModule) -> Connection:
        """A_j = ξ_j-coefficient of s'_1"""
        if M.N < 1:
            raise OrderError('a connection needs the level-1 stratification')
        identity = Matrix.identity(M.rank, M.module.poly_domain)
        if M.matrix(1, (0,) * M.d) != identity:
            raise StratificationError('s\'_1 has a non-identity constant coefficient')
        mats = tuple(M.matrix(1, unit_vector(M.d, j)) for j in range(M.d))
        return Connection(M.d, M.rank, mats, M.field, M.name)

    @timed
    def verify_strat_morphism(self, F: Matrix, source: StratModule, target: StratModule) -> Dict:
        """F·M_a = Σ_c N_{a−c}·H_c(F) at every level both modules carry"""
        if F.shape != (target.rank, source.rank):
            raise ShapeError(f'morphism of shape {F.shape} between ranks {source.rank} and {target.rank}')
        defects = []
        for n in range(min(source.N, target.N) + 1):
            for a in multi_indices(source.d, n):
                lhs = F @ source.matrix(n, a)
                rhs = Matrix.zeros(target.rank, source.rank, F.domain)
                for c in sub_exponents(a):
                    Hc = derivative_matrix(F, c)
                    if target.mode == 'divided':
                        Hc = Hc.scale(target.field.integer(multi_binomial(a, c) * multi_factorial(c)))
                    rhs = rhs + target.matrix(n, sub(a, c)) @ Hc
                if lhs != rhs:
                    defects.append({'level': n, 'alpha': list(a)})
        return {'pass': not defects, 'defects': defects[:10]}

    def _connection_kmatrix(self, conn: Connection, bound: int) -> Tuple[Matrix, int]:
        """v ↦ (∇_1 v, ..., ∇_d v) on vectors with coefficients of degree <= bound"""
        growth = 0
        for A in conn.matrices:
            for row in A.rows:
                for f in row:
                    if f:
                        growth = max(growth, max(sum(m) for m in f.keys()))
        target_bound = bound + growth
        src = index_of(conn.d, bound)
        tgt = index_of(conn.d, target_bound)
        K = conn.field.domain
        R = conn.ring
        columns = []
        for k in range(conn.rank):
            for beta in multi_indices(conn.d, bound):
                v = [R.zero] * conn.rank
                v[k] = R.from_dict({beta: K.one})
                col = [K.zero] * (conn.d * conn.rank * len(tgt))
                for j in range(conn.d):
                    for row, f in enumerate(covariant(conn, j, v)):
                        for monom, c in f.items():
                            col[(j * conn.rank + row) * len(tgt) + tgt[monom]] = c
                columns.append(tuple(col))
        return Matrix.from_columns(columns, K, conn.d * conn.rank * len(tgt)), len(src)

    def _horizontal_of_connection(self, conn: Connection, bound: int):
        K_matrix, size = self._connection_kmatrix(conn, bound)
        R = conn.ring
        basis = []
        monomials = multi_indices(conn.d, bound)
        for v in K_matrix.kernel():
            vector = []
            for k in range(conn.rank):
                vector.append(R.from_dict({monomials[i]: v[k * size + i] for i in range(size) if v[k * size + i]}))
            basis.append(tuple(vector))
        return basis

    def _induced_kmatrix(self, tower: InducedTower, level: int) -> Matrix:
        """∇̄: P^{level+1} ⊗ L -> Ω¹ ⊗ P^level ⊗ L on constant coefficients"""
        d, r = tower.d, tower.generator.rank
        field = tower.generator.field
        K = field.domain
        target = index_of(d, level)
        entries = {}
        for col, gamma in enumerate(multi_indices(d, level + 1)):
            for j in range(d):
                if not gamma[j]:
                    continue
                lowered = sub(gamma, unit_vector(d, j))
                if lowered not in target:
                    continue
                coeff = K.convert(gamma[j]) if tower.mode == 'plain' else K.one
                if not coeff:
                    continue
                for k in range(r):
                    entries[((j * len(target) + target[lowered]) * r + k, col * r + k)] = coeff
        return Matrix.from_entries(entries, d * len(target) * r, len(multi_indices(d, level + 1)) * r, K)

    @timed
    def horizontal_sections(self, M: Union[StratModule, InducedTower], bound: int, margin: int = 1,
                            probe: int = 1) -> HorizontalSections:
        """Horizontal elements with coefficients of degree <= bound"""
        try:
            if bound < 0:
                raise OrderError(f'degree bound must be >= 0, got {bound}')
            if isinstance(M, InducedTower):
                return self._horizontal_induced(M, bound, margin, probe)
            conn = self.extract_connection(M)
            basis = self._horizontal_of_connection(conn, bound)
            wider = self._horizontal_of_connection(conn, bound + margin)
            stabilized = len(basis) == len(wider)
            if not stabilized:
                self.logger.warning(f'horizontal sections of {M.name or "module"} grow past degree {bound}')
            return HorizontalSections(tuple(basis), bound, stabilized, (len(basis), len(wider)))
        except EngineError as e:
            self.logger.error(f"Error computing horizontal sections: {str(e)}")
            raise

    def _horizontal_induced(self, tower: InducedTower, bound: int, margin: int, probe: int) -> HorizontalSections:
        d, r = tower.d, tower.generator.rank
        monomials = multi_indices(d, bound)
        width = len(monomials)
        top = probe + margin + 1
        # level n of the kernel tower is ∇̄ on P^{n+1} ⊗ L, with coefficients of degree <= bound
        kernels = [self._induced_kmatrix(tower, n).kron_identity(width) for n in range(top + 1)]
        K = tower.generator.field.domain
        transitions = [truncation_matrix(d, n + 2, n + 1, r, K).kron_identity(width) for n in range(top)]
        # Ω¹ ⊗ P^{n+1} ⊗ L -> Ω¹ ⊗ P^n ⊗ L, one truncation block per dx_j
        target_transitions = []
        for n in range(top):
            T = truncation_matrix(d, n + 1, n, r, K)
            blocks = [[T if i == j else None for j in range(d)] for i in range(d)]
            target_transitions.append(Matrix.block(blocks, [T.nrows] * d, [T.ncols] * d, K).kron_identity(width))
        result = self.exactcore.stable_kernel(kernels, transitions, probe, margin, target_transitions)
        R = tower.generator.ring
        P = JetAlgebra(d, probe + 1, tower.generator.field, tower.mode)
        basis = []
        for v in result['basis']:
            per_rank = []
            for k in range(r):
                terms = {}
                for g, gamma in enumerate(P.basis):
                    base = (g * r + k) * width
                    f = R.from_dict({monomials[i]: v[base + i] for i in range(width) if v[base + i]})
                    if f:
                        terms[gamma] = f
                per_rank.append(P.element(terms))
            basis.append(tuple(per_rank))
        return HorizontalSections(tuple(basis), bound, result['stabilized'], tuple(result['dimensions']), probe)

    @timed
    def strat_endomorphisms(self, rank: int, r: int, N: int, d: int, mode: str = 'plain', field=None) -> Dict:
        """Constant level maps g_n: P^{n+r} ⊗ L -> P^n ⊗ L commuting with δ and the transitions"""
        field = field or ScalarField(0)
        K = field.domain
        L = FreeModule(d, rank, field)
        tower = InducedTower(L, N + r, mode)
        shapes = [(len(multi_indices(d, n)) * rank, len(multi_indices(d, n + r)) * rank) for n in range(N + 1)]
        offsets = [0]
        for rows, cols in shapes:
            offsets.append(offsets[-1] + rows * cols)
        unknowns = offsets[-1]

        def var(n, i, j):
            return offsets[n] + i * shapes[n][1] + j

        equations = []

        def left_product(A: Matrix, n: int):
            """Rows of the linear forms for entries of A @ X_n"""
            rows = []
            for i in range(A.nrows):
                for j in range(shapes[n][1]):
                    form = {}
                    for l, a in enumerate(A.rows[i]):
                        if a:
                            form[var(n, l, j)] = form.get(var(n, l, j), K.zero) + a
                    rows.append(form)
            return rows

        def right_product(n: int, B: Matrix):
            """Rows of the linear forms for entries of X_n @ B"""
            rows = []
            for i in range(shapes[n][0]):
                for j in range(B.ncols):
                    form = {}
                    for l in range(B.nrows):
                        b = B.rows[l][j]
                        if b:
                            form[var(n, i, l)] = form.get(var(n, i, l), K.zero) + b
                    rows.append(form)
            return rows

        def subtract(lhs, rhs):
            for f, g in zip(lhs, rhs):
                eq = dict(f)
                for key, value in g.items():
                    eq[key] = eq.get(key, K.zero) - value
                eq = {key: value for key, value in eq.items() if value}
                if eq:
                    equations.append(eq)

        for n in range(N):
            T_low = truncation_matrix(d, n + 1, n, rank, K)
            T_high = truncation_matrix(d, n + r + 1, n + r, rank, K)
            subtract(left_product(T_low, n + 1), right_product(n, T_high))
        for n in range(1, N + 1):
            for first in range(1, n + 1):
                second = n - first
                delta_low = self.induced_level_map(tower, first, second)
                delta_high = self.induced_level_map(tower, first, second + r)
                lhs = left_product(delta_low, n)
                # (id_{P^first} ⊗ X_second) @ delta_high, block-diagonal in the first factor
                rhs = []
                outer = len(multi_indices(d, first))
                rows_s, cols_s = shapes[second]
                for a in range(outer):
                    for i in range(rows_s):
                        for j in range(delta_high.ncols):
                            form = {}
                            for l in range(cols_s):
                                b = delta_high.rows[a * cols_s + l][j]
                                if b:
                                    form[var(second, i, l)] = form.get(var(second, i, l), K.zero) + b
                            rhs.append(form)
                subtract(lhs, rhs)
        system = Matrix.from_entries({(row, col): value for row, eq in enumerate(equations)
                                      for col, value in eq.items()}, len(equations), unknowns, K)
        solutions = system.kernel() if equations else [
            tuple(K.one if i == j else K.zero for i in range(unknowns)) for j in range(unknowns)]
        collapse_rank = 0
        if solutions:
            collapse = Matrix.from_rows([s[:offsets[1]] for s in solutions], K)
            collapse_rank = collapse.rank()
        expected = comb(r + d, d) * rank * rank
        return {
            'dimension': len(solutions),
            'expected_dimension': expected,
            'collapse_kernel': len(solutions) - collapse_rank,
            'pass': len(solutions) == expected and len(solutions) == collapse_rank
        }
