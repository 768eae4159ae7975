from itertools import permutations
from math import factorial
from typing import Dict, List, Sequence, Tuple

from .base_service import BaseService, timed
from .diffop_service import DiffOpService
from .exactcore_service import ExactCoreService, klinearize_operator
from .strat_service import StratService
from ..errors import EngineError, NonInvertibleError, OrderError, ShapeError
from ..models.complex import ChainComplex
from ..models.field import ScalarField
from ..models.forms import Bicomplex, DifferentialComplex, Form, FormModule, wedge_sign
from ..models.jet import GradedJetPiece, product_factor
from ..models.matrix import Matrix
from ..models.module import DiffOperator, FreeModule
from ..models.poly import (
    add, form_basis, hasse, index_of, multi_indices, norm, sub, substitute_linear,
    unit_vector)
from ..models.strat import Connection, StratModule


def jet_form_basis(d: int, m: int, p: int) -> List[Tuple]:
    """(α, I) for P^m ⊗ Ω^p, α outer"""
    if m < 0 or p < 0 or p > d:
        return []
    return [(alpha, I) for alpha in multi_indices(d, m) for I in form_basis(d, p)]


def derham_entries(source: Sequence[Tuple], target: Sequence[Tuple], d: int, mode: str, field: ScalarField):
    """∇̄(ξ^α ⊗ dx_I) = Σ_j α_j ξ^{α−e_j} ⊗ dx_j∧dx_I (divided: coefficient 1)"""
    index = {key: i for i, key in enumerate(target)}
    entries = {}
    for col, (alpha, I) in enumerate(source):
        for j in range(d):
            if not alpha[j]:
                continue
            sign, K = wedge_sign((j,), I)
            if not sign:
                continue
            row = index.get((sub(alpha, unit_vector(d, j)), K))
            if row is None:
                continue
            coeff = field.integer(sign * (alpha[j] if mode == 'plain' else 1))
            if coeff:
                entries[(row, col)] = entries.get((row, col), field.zero) + coeff
    return entries


def contraction_entries(source: Sequence[Tuple], target: Sequence[Tuple], d: int, mode: str,
                        field: ScalarField, weight=None):
    """s(ξ^α ⊗ dx_I) = w⁻¹ Σ_m (−1)^m ξ^{α+e_{i_m}} ⊗ dx_{I∖i_m}, w = |α| + |I| (divided: no w⁻¹)"""
    index = {key: i for i, key in enumerate(target)}
    entries = {}
    for col, (alpha, I) in enumerate(source):
        w = weight if weight is not None else norm(alpha) + len(I)
        scale = field.inverse_int(w) if mode == 'plain' else field.one
        for m, i in enumerate(I):
            row = index.get((add(alpha, unit_vector(d, i)), I[:m] + I[m + 1:]))
            if row is None:
                continue
            value = scale if m % 2 == 0 else -scale
            entries[(row, col)] = entries.get((row, col), field.zero) + value
    return entries


def to_poly_matrix(M: Matrix, R) -> Matrix:
    return Matrix(tuple(tuple(R(a) for a in row) for row in M.rows), M.shape, R.to_domain())


class DeRhamService(BaseService):
    """Service class for De Rham complexes, their homotopies and the comparison maps"""

    def __init__(self, exactcore: ExactCoreService = None, diffop: DiffOpService = None,
                 strat: StratService = None):
        super().__init__('derham')
        self.exactcore = exactcore or ExactCoreService()
        self.diffop = diffop or DiffOpService()
        self.strat = strat or StratService(self.exactcore)

    # forms

    def wedge(self, omega: Form, tau: Form) -> Form:
        if omega.d != tau.d:
            raise ShapeError('forms over different dimensions')
        out = {}
        for I, f in omega.terms:
            for J, g in tau.terms:
                sign, K = wedge_sign(I, J)
                if sign:
                    out[K] = out[K] + f * g * sign if K in out else f * g * sign
        if omega.p + tau.p > omega.d:
            return Form(omega.d, omega.p + tau.p, (), omega.field)
        return Form.build(omega.d, omega.p + tau.p, out, omega.field)

    def exterior_derivative(self, omega: Form) -> Form:
        """d(f dx_I) = Σ_j ∂_j f dx_j∧dx_I"""
        out = {}
        for I, f in omega.terms:
            for j in range(omega.d):
                sign, K = wedge_sign((j,), I)
                if not sign:
                    continue
                g = hasse(f, unit_vector(omega.d, j))
                if g:
                    out[K] = out[K] + g * sign if K in out else g * sign
        if omega.p + 1 > omega.d:
            return Form(omega.d, omega.p + 1, (), omega.field)
        return Form.build(omega.d, omega.p + 1, out, omega.field)

    # graded and linearized Poincaré complexes

    @timed
    def graded_derham_level(self, n: int, d: int, field: ScalarField = ScalarField(0),
                            mode: str = 'plain') -> ChainComplex:
        """0 -> I^n/I^{n+1} -> I^{n−1}/I^n ⊗ Ω¹ -> ... with its contracting homotopy"""
        if n < 1:
            raise OrderError(f'graded levels start at n = 1, got {n}')
        K = field.domain
        pieces = [list(GradedJetPiece(d, n - p, p).basis) for p in range(d + 1)]
        ranks = tuple(len(b) for b in pieces)
        mats = tuple(Matrix.from_entries(derham_entries(pieces[p], pieces[p + 1], d, mode, field),
                                         ranks[p + 1], ranks[p], K) for p in range(d))
        name = f'graded n={n} d={d} {field.name} {mode}'
        homotopy = None
        if mode == 'plain' and field.is_zero_int(n):
            self.logger.warning(f'homotopy refused for {name}: {n} is not invertible')
        else:
            homotopy = [Matrix.zeros(0, ranks[0], K)]
            for p in range(1, d + 1):
                homotopy.append(Matrix.from_entries(
                    contraction_entries(pieces[p], pieces[p - 1], d, mode, field, weight=n),
                    ranks[p - 1], ranks[p], K))
            homotopy = tuple(homotopy)
        return ChainComplex(ranks, mats, field, homotopy, name)

    def graded_homotopy(self, n: int, d: int, field: ScalarField = ScalarField(0), mode: str = 'plain'):
        """The homotopy of graded_derham_level; refuses when 1/n does not exist"""
        C = self.graded_derham_level(n, d, field, mode)
        if C.homotopy is None:
            raise NonInvertibleError(f'{n} is not invertible in {field.name}')
        return C.homotopy

    @timed
    def linearized_derham_level(self, n: int, d: int, field: ScalarField = ScalarField(0),
                                mode: str = 'plain') -> ChainComplex:
        """0 -> O -> P^n -> P^{n−1} ⊗ Ω¹ -> ... -> P^{n−d} ⊗ Ω^d -> 0 over constants"""
        if n < 0:
            raise OrderError(f'level must be >= 0, got {n}')
        K = field.domain
        bases = [[((0,) * d, ())]] + [jet_form_basis(d, n - p, p) for p in range(d + 1)]
        ranks = tuple(len(b) for b in bases)
        mats = [Matrix.from_entries({(0, 0): K.one}, ranks[1], 1, K)]
        for p in range(d):
            mats.append(Matrix.from_entries(derham_entries(bases[p + 1], bases[p + 2], d, mode, field),
                                            ranks[p + 2], ranks[p + 1], K))
        name = f'linearized n={n} d={d} {field.name} {mode}'
        homotopy = None
        if mode == 'plain' and any(field.is_zero_int(w) for w in range(1, n + 1)):
            self.logger.info(f'no contracting homotopy for {name}')
        else:
            homotopy = [Matrix.zeros(0, 1, K), Matrix.from_entries({(0, 0): K.one}, 1, ranks[1], K)]
            for p in range(1, d + 1):
                homotopy.append(Matrix.from_entries(
                    contraction_entries(bases[p + 1], bases[p], d, mode, field), ranks[p], ranks[p + 1], K))
            homotopy = tuple(homotopy)
        return ChainComplex(ranks, tuple(mats), field, homotopy, name)

    # De Rham complex of a stratified module

    def derham_of_connection(self, conn: Connection) -> DifferentialComplex:
        """Ω^• ⊗ L with d(f dx_I ⊗ e_k) = Σ_j dx_j∧dx_I ⊗ (∂_j f e_k + f A_j e_k)"""
        d, r = conn.d, conn.rank
        R = conn.ring
        modules = tuple(FormModule(d, p, conn.field).tensor(r) for p in range(d + 1))
        operators = []
        for p in range(d):
            source, target = form_basis(d, p), {I: i for i, I in enumerate(form_basis(d, p + 1))}
            bar0, bars = {}, [dict() for _ in range(d)]
            for col, I in enumerate(source):
                for j in range(d):
                    sign, K = wedge_sign((j,), I)
                    if not sign:
                        continue
                    row = target[K]
                    A = conn.matrices[j]
                    for k in range(r):
                        bars[j][(row * r + k, col * r + k)] = R(sign)
                        for l in range(r):
                            if A.rows[l][k]:
                                key = (row * r + l, col * r + k)
                                bar0[key] = bar0.get(key, R.zero) + A.rows[l][k] * sign
            dom = modules[p].poly_domain
            shape = (modules[p + 1].rank, modules[p].rank)
            table = {(0,) * d: Matrix.from_entries(bar0, *shape, dom)}
            for j in range(d):
                table[unit_vector(d, j)] = Matrix.from_entries(bars[j], *shape, dom)
            operators.append(DiffOperator.from_table(modules[p], modules[p + 1], table, 1))
        return DifferentialComplex(modules, tuple(operators), conn.name or 'derham')

    def derham_complex(self, d: int, field: ScalarField = ScalarField(0)) -> DifferentialComplex:
        return self.derham_of_connection(Connection.trivial(d, 1, field))

    @timed
    def derham_of_strat(self, M: StratModule) -> DifferentialComplex:
        try:
            F = self.derham_of_connection(self.strat.extract_connection(M))
            relations = self.diffop.verify_order1_relations(F)
            if not relations['pass']:
                self.logger.warning(f'DR complex of {M.name or "module"} has d² != 0: {relations["degrees"]}')
            return F
        except EngineError as e:
            self.logger.error(f"Error building DR complex: {str(e)}")
            raise

    # σ, η and Φ

    def shuffle_sigma(self, I: Sequence[int], field: ScalarField = ScalarField(0)) -> Dict:
        """σ(dx_I) = (j−1)!·Σ_m (−1)^m dx_{i_m} ⊗ dx_{I∖i_m} in Ω¹ ⊗ Ω^{j−1}"""
        I = tuple(I)
        if not I:
            raise OrderError('σ needs a form of degree >= 1')
        scale = factorial(len(I) - 1)
        return {((i,), I[:m] + I[m + 1:]): field.integer(scale if m % 2 == 0 else -scale)
                for m, i in enumerate(I)}

    def _partials(self, F: DifferentialComplex, t: int) -> List[Matrix]:
        return self.diffop.extract_order1_parts(F.operators[t])[1]

    def eta_map(self, F: DifferentialComplex, i: int, j: int) -> Matrix:
        """η^{i,j}(dx_I ⊗ s) = X^{(i−1)}_{i_1} ⋯ X^{(i−j)}_{i_j} s on Ω^j ⊗ F^{i−j}"""
        return self._shuffle_map(F, i, j, antisymmetrize=False)

    def sigma_map(self, F: DifferentialComplex, i: int, j: int) -> Matrix:
        """Σ over orderings π of I of sgn(π)·X_{π_1} ⋯ X_{π_j}"""
        return self._shuffle_map(F, i, j, antisymmetrize=True)

    @timed
    def verify_sigma_eta(self, F: DifferentialComplex, max_j: int = 3) -> Dict:
        """σ^{i,j} = j!·η^{i,j} as matrices for every degree i and j <= max_j"""
        failures = []
        for i in range(F.length):
            for j in range(min(F.d, i, max_j) + 1):
                if self.sigma_map(F, i, j) != self.eta_map(F, i, j).scale(factorial(j)):
                    failures.append({'i': i, 'j': j})
        return {'pass': not failures, 'failures': failures}

    def _shuffle_map(self, F: DifferentialComplex, i: int, j: int, antisymmetrize: bool) -> Matrix:
        if j > F.d or i - j < 0 or i >= F.length:
            raise OrderError(f'no η^{{{i},{j}}} on this complex')
        target = F.modules[i]
        r = F.rank(i - j)
        dom = target.poly_domain
        partials = {t: self._partials(F, t) for t in range(i - j, i)}
        blocks = []
        for I in form_basis(F.d, j):
            orderings = permutations(range(j)) if antisymmetrize else [tuple(range(j))]
            acc = Matrix.zeros(target.rank, r, dom)
            for perm in orderings:
                inversions = sum(1 for a in range(j) for b in range(a + 1, j) if perm[a] > perm[b])
                chain = Matrix.identity(r, dom)
                for m in range(j - 1, -1, -1):
                    chain = partials[i - 1 - m][I[perm[m]]] @ chain
                acc = acc - chain if inversions % 2 else acc + chain
            blocks.append(acc)
        if not blocks:
            return Matrix.zeros(target.rank, 0, dom)
        return blocks[0].hstack(*blocks[1:])

    def phi_component(self, F: DifferentialComplex, level: int, i: int, j: int) -> DiffOperator:
        """Φ^{i,j} = η^{i,j}∘(id ⊗ q ⊗ id) on Ω^j ⊗ P^level ⊗ F^{i−j}, basis (I, β, k)"""
        eta = self.eta_map(F, i, j)
        r = F.rank(i - j)
        width = len(multi_indices(F.d, level))
        forms = len(form_basis(F.d, j))
        source = FreeModule(F.d, forms * width * r, F.field)
        entries = {}
        for f in range(forms):
            for k in range(r):
                col = eta.column(f * r + k)
                for row, value in enumerate(col):
                    if value:
                        entries[(row, (f * width) * r + k)] = value
        M = Matrix.from_entries(entries, F.rank(i), source.rank, source.poly_domain)
        return DiffOperator.from_table(source, F.modules[i], {(0,) * F.d: M}, 0)

    def phi_map(self, F: DifferentialComplex, level: int, i: int) -> Matrix:
        """Φ^i = Σ_j Φ^{i,j} as one block row"""
        blocks = [self.phi_component(F, level, i, j).matrix((0,) * F.d)
                  for j in range(min(F.d, i) + 1)]
        return blocks[0].hstack(*blocks[1:])

    def jet_inclusion(self, F: DifferentialComplex, level: int, i: int) -> DiffOperator:
        """d¹ ⊗ id: F^i -> P^level ⊗ F^i, bar[α](e_k) = ξ^α ⊗ e_k"""
        r = F.rank(i)
        width = len(multi_indices(F.d, level))
        target = FreeModule(F.d, width * r, F.field)
        dom = target.poly_domain
        table = {}
        for g, alpha in enumerate(multi_indices(F.d, level)):
            table[alpha] = Matrix.from_entries({(g * r + k, k): dom.one for k in range(r)},
                                               target.rank, r, dom)
        return DiffOperator.from_table(F.modules[i], target, table, level)

    def dprime(self, F: DifferentialComplex, level: int, q: int, t: int) -> DiffOperator:
        """d′: Ω^q ⊗ P^level ⊗ F^t -> Ω^{q+1} ⊗ P^{level−1} ⊗ F^t"""
        d, r = F.d, F.rank(t)
        src_forms, tgt_forms = form_basis(d, q), {I: n for n, I in enumerate(form_basis(d, q + 1))}
        src_jets = multi_indices(d, level)
        tgt_jets = index_of(d, level - 1) if level >= 1 else {}
        source = FreeModule(d, len(src_forms) * len(src_jets) * r, F.field)
        target = FreeModule(d, len(tgt_forms) * len(tgt_jets) * r, F.field)
        R = source.ring
        bar0, bars = {}, [dict() for _ in range(d)]
        for f, I in enumerate(src_forms):
            for b, beta in enumerate(src_jets):
                for j in range(d):
                    sign, K = wedge_sign((j,), I)
                    if not sign:
                        continue
                    if beta[j]:
                        lowered = sub(beta, unit_vector(d, j))
                        for k in range(r):
                            row = (tgt_forms[K] * len(tgt_jets) + tgt_jets[lowered]) * r + k
                            col = (f * len(src_jets) + b) * r + k
                            bar0[(row, col)] = bar0.get((row, col), R.zero) - R(sign * beta[j])
                    if beta in tgt_jets:
                        for k in range(r):
                            row = (tgt_forms[K] * len(tgt_jets) + tgt_jets[beta]) * r + k
                            bars[j][(row, (f * len(src_jets) + b) * r + k)] = R(sign)
        dom = source.poly_domain
        table = {(0,) * d: Matrix.from_entries(bar0, target.rank, source.rank, dom)}
        for j in range(d):
            table[unit_vector(d, j)] = Matrix.from_entries(bars[j], target.rank, source.rank, dom)
        return DiffOperator.from_table(source, target, table, 1)

    def ddouble(self, F: DifferentialComplex, level: int, q: int, t: int) -> DiffOperator:
        """d″ = id_{Ω^q} ⊗ Q⁰(d^t_F)_{level−1}"""
        Q = self.diffop.linearize(F.operators[t], level - 1, shift=1)
        forms = len(form_basis(F.d, q))
        block = Matrix.block([[Q if a == b else None for b in range(forms)] for a in range(forms)],
                             [Q.nrows] * forms, [Q.ncols] * forms, Q.domain)
        source = FreeModule(F.d, block.ncols, F.field)
        target = FreeModule(F.d, block.nrows, F.field)
        return DiffOperator.from_table(source, target, {(0,) * F.d: block}, 0)

    @timed
    def verify_phi_chainmap(self, F: DifferentialComplex, levels: int) -> Dict:
        """d_F∘Φ^{p,q} = Φ^{p+1,q+1}∘d′ + (−1)^q Φ^{p+1,q}∘d″ at levels 1..levels, and Φ∘d¹ = id"""
        failures = []
        for level in range(1, levels + 1):
            for p in range(F.length - 1):
                for q in range(min(F.d, p) + 1):
                    t = p - q
                    phi = self.phi_component(F, level, p, q)
                    lhs = self.diffop.compose(F.operators[p], phi)
                    rhs = None
                    if q + 1 <= F.d:
                        rhs = self.diffop.compose(self.phi_component(F, level - 1, p + 1, q + 1),
                                                  self.dprime(F, level, q, t))
                    second = self.diffop.compose(self.phi_component(F, level - 1, p + 1, q),
                                                 self.ddouble(F, level, q, t))
                    second = second if q % 2 == 0 else -second
                    rhs = second if rhs is None else rhs + second
                    if lhs.table() != rhs.table():
                        failures.append({'level': level, 'p': p, 'q': q})
        inclusion = []
        for level in range(levels + 1):
            for i in range(F.length):
                Phi = self.phi_map(F, level, i)
                total = FreeModule(F.d, Phi.ncols, F.field)
                # d¹ ⊗ id lands in the j = 0 summand, which comes first
                inclusion_table = {alpha: X.vstack(Matrix.zeros(Phi.ncols - X.nrows, X.ncols, X.domain))
                                   for alpha, X in self.jet_inclusion(F, level, i).table().items()}
                composite = self.diffop.compose(
                    DiffOperator.from_table(total, F.modules[i], {(0,) * F.d: Phi}, 0),
                    DiffOperator.from_table(F.modules[i], total, inclusion_table, level))
                if composite.table() != DiffOperator.identity(F.modules[i]).table():
                    inclusion.append({'level': level, 'degree': i})
        return {
            'pass': not failures and not inclusion,
            'chain_map': {'pass': not failures, 'failures': failures[:10]},
            'retraction': {'pass': not inclusion, 'failures': inclusion[:10]}
        }

    @timed
    def phi_covariance(self, F: DifferentialComplex, G, i: int) -> Dict:
        """Under x ↦ Gx: Φ'_J = Σ_I det(G⁻¹[J, I])·σ(Φ_I), with σ(f)(x) = f(Gx)"""
        K = F.field.domain
        Gm = Matrix.from_rows(G, K)
        Ginv = Gm.inverse()
        moved = DifferentialComplex(F.modules, tuple(self.diffop.change_coordinates(D, G) for D in F.operators),
                                    f'{F.name}^G')
        mismatches = []
        for j in range(min(F.d, i) + 1):
            r = F.rank(i - j)
            before = self.eta_map(F, i, j)
            after = self.eta_map(moved, i, j)
            basis = form_basis(F.d, j)
            for a, J in enumerate(basis):
                expected = Matrix.zeros(F.rank(i), r, before.domain)
                for b, I in enumerate(basis):
                    minor = Matrix.from_rows([[Ginv.rows[x][y] for y in I] for x in J], K, len(I)).det()
                    if not minor:
                        continue
                    block = Matrix.from_columns([before.column(b * r + k) for k in range(r)], before.domain,
                                                F.rank(i))
                    expected = expected + block.map(lambda f: substitute_linear(f, Gm.rows)).scale(minor)
                actual = Matrix.from_columns([after.column(a * r + k) for k in range(r)], after.domain, F.rank(i))
                if actual != expected:
                    mismatches.append({'j': j, 'form': list(J)})
        chain = self.verify_phi_chainmap(moved, 1)['pass']
        return {'pass': not mismatches and chain, 'mismatches': mismatches, 'chain_map_after_change': chain}

    # bicomplexes

    def total_differentials(self, B: Bicomplex) -> Tuple[Tuple[int, ...], List[Matrix]]:
        """Ranks of ⊕_{p+q=t} I^{p,q} and d_tot = d′ + (−1)^p d″ between them"""
        K = B.field.domain
        cells = [sorted((p, q) for (p, q) in B.ranks if p + q == t) for t in range(B.max_total + 1)]
        ranks = tuple(sum(B.rank(p, q) for p, q in cs) for cs in cells)
        mats = []
        for t in range(len(cells) - 1):
            src, tgt = cells[t], cells[t + 1]
            blocks = []
            for (p2, q2) in tgt:
                row = []
                for (p, q) in src:
                    if (p2, q2) == (p + 1, q):
                        row.append(B.horizontal(p, q))
                    elif (p2, q2) == (p, q + 1):
                        v = B.vertical(p, q)
                        row.append(v if p % 2 == 0 else -v)
                    else:
                        row.append(None)
                blocks.append(row)
            mats.append(Matrix.block(blocks, [B.rank(*c) for c in tgt], [B.rank(*c) for c in src], K))
        return ranks, mats

    @timed
    def total_complex(self, B: Bicomplex) -> ChainComplex:
        ranks, mats = self.total_differentials(B)
        return ChainComplex(ranks, tuple(mats), B.field, None, f'total({B.name})')

    @timed
    def verify_total_complex(self, B: Bicomplex) -> Dict:
        """d_tot² = 0 at every degree, then the homology of the total complex"""
        ranks, mats = self.total_differentials(B)
        failures = [t for t in range(len(mats) - 1) if not (mats[t + 1] @ mats[t]).is_zero()]
        result = {'pass': not failures, 'total_ranks': list(ranks), 'failed_degrees': failures}
        if not failures:
            C = ChainComplex(ranks, tuple(mats), B.field, None, f'total({B.name})')
            result['homology_ranks'] = self.exactcore.complex_homology_ranks(C)
        return result

    @timed
    def derham_q0_bicomplex(self, F: DifferentialComplex, level: int, bound: int) -> Bicomplex:
        """Cells Ω^p ⊗ P^{level−p−q} ⊗ F^q over k, coefficient degrees <= bound + (p+q)·g"""
        try:
            cells = [(p, q) for p in range(F.d + 1) for q in range(F.length) if level - p - q >= 0]
            dh, dv = {}, {}
            for (p, q) in cells:
                ell = level - p - q
                if ell >= 1:
                    if p + 1 <= F.d:
                        dh[(p, q)] = self.dprime(F, ell, p, q)
                    if q + 1 < F.length:
                        dv[(p, q)] = self.ddouble(F, ell, p, q)
            growth = max([D.degree_growth() for D in list(dh.values()) + list(dv.values())] + [0])
            bounds = {c: bound + (c[0] + c[1]) * growth for c in cells}
            ranks = {}
            for (p, q) in cells:
                ell = level - p - q
                size = len(form_basis(F.d, p)) * len(multi_indices(F.d, ell)) * F.rank(q)
                ranks[(p, q)] = size * len(multi_indices(F.d, bounds[(p, q)]))
            dh_k = {c: klinearize_operator(D, bounds[c], bounds[c] + growth) for c, D in dh.items()}
            dv_k = {c: klinearize_operator(D, bounds[c], bounds[c] + growth) for c, D in dv.items()}
            return Bicomplex(ranks, dh_k, dv_k, F.field, f'DR.Q0({F.name}) level {level}')
        except EngineError as e:
            self.logger.error(f"Error building DR.Q0 bicomplex: {str(e)}")
            raise

    # Ψ

    def _intertwiner(self, M: StratModule, level: int, p: int) -> Matrix:
        """E(ξ^β dx_I e_k) = Σ_α factor(β, α)·(M_α)_{lk} ξ^{β+α} dx_I e_l, truncated at level"""
        d, r = M.d, M.rank
        jets = multi_indices(d, level)
        jet_index = index_of(d, level)
        forms = form_basis(d, p)
        size = len(jets) * len(forms) * r
        dom = M.module.poly_domain
        table = M.table(min(level, M.N))
        entries = {}
        for b, beta in enumerate(jets):
            for alpha, X in table.items():
                target = add(beta, alpha)
                if target not in jet_index:
                    continue
                factor = product_factor(M.mode, beta, alpha)
                for f in range(len(forms)):
                    for k in range(r):
                        col = (b * len(forms) + f) * r + k
                        for l in range(r):
                            if X.rows[l][k]:
                                row = (jet_index[target] * len(forms) + f) * r + l
                                entries[(row, col)] = entries.get((row, col), dom.zero) + X.rows[l][k] * factor
        return Matrix.from_entries(entries, size, size, dom)

    @timed
    def verify_psi_exactness(self, M: StratModule, levels: int) -> Dict:
        """Exactness of M ⊗ (linearized De Rham) and E∘Q⁰(d_DR(M)) = (∇̄ ⊗ id)∘E"""
        field = M.field
        exactness = []
        for n in range(levels + 1):
            C = self.linearized_derham_level(n, M.d, field, M.mode).tensor_rank(M.rank, f'M x linearized n={n}')
            use_homotopy = (C.homotopy is not None and M.mode == 'plain'
                            and (field.characteristic == 0 or n < field.characteristic))
            if use_homotopy:
                ok = self.exactcore.check_homotopy_identity(C)['pass']
                method = 'homotopy'
            else:
                ok = not any(self.exactcore.complex_homology_ranks(C))
                method = 'ranks'
            exactness.append({'level': n, 'pass': ok, 'method': method})
        F = self.derham_of_strat(M)
        R = M.module.ring
        failures = []
        for level in range(min(levels, M.N - 1) + 1):
            for p in range(M.d):
                Q = self.diffop.linearize(F.operators[p], level, shift=1, mode=M.mode)
                lin = Matrix.from_entries(
                    derham_entries(jet_form_basis(M.d, level + 1, p), jet_form_basis(M.d, level, p + 1),
                                   M.d, M.mode, field),
                    len(jet_form_basis(M.d, level, p + 1)), len(jet_form_basis(M.d, level + 1, p)), field.domain)
                lhs = self._intertwiner(M, level, p + 1) @ Q
                rhs = to_poly_matrix(lin.kron_identity(M.rank), R) @ self._intertwiner(M, level + 1, p)
                if lhs != rhs:
                    failures.append({'level': level, 'p': p})
        intertwining = {'status': 'fail' if failures else 'pass', 'failures': failures}
        ok = all(e['pass'] for e in exactness) and not failures
        return {'pass': ok, 'exactness': exactness, 'intertwining': intertwining}
