from typing import Dict

from .base_service import BaseService
from ..errors import DimensionMismatchError, EngineError, NonInvertibleError, OrderError
from ..models.field import ScalarField
from ..models.jet import MODES, GradedJetPiece, JetAlgebra, JetElement, JetTensor, product_factor
from ..models.poly import add, hasse, multi_binomial, multi_factorial, multi_indices, norm, sub, sub_exponents


def taylor_terms(f, m: int, mode: str = 'plain') -> Dict:
    """Coefficients of Σ H_α(f) ξ^α in the basis of the given mode"""
    R = f.ring
    out = {}
    for alpha in multi_indices(R.ngens, m):
        c = hasse(f, alpha)
        if c and mode == 'divided':
            c = c * R.domain.convert(multi_factorial(alpha))
        if c:
            out[alpha] = c
    return out


def split_terms(gamma, p: int, m: int, mode: str):
    """(a, b, factor) with ξ^γ ↦ Σ factor·ξ^a ⊗ ξ^b, |a| <= m − p, |b| <= p"""
    for a in sub_exponents(gamma):
        b = sub(gamma, a)
        if norm(a) <= m - p and norm(b) <= p:
            yield a, b, (multi_binomial(gamma, a) if mode == 'plain' else 1)


class JetService(BaseService):
    """Service class for principal parts algebras"""

    def __init__(self):
        super().__init__('jet')

    def algebra(self, d: int, m: int, field: ScalarField = ScalarField(0), mode: str = 'plain') -> JetAlgebra:
        return JetAlgebra(d, m, field, mode)

    def truncate(self, v: JetElement, n: int) -> JetElement:
        """q_{m,n}: drop every term of order above n"""
        if n > v.algebra.m or n < 0:
            raise OrderError(f'cannot truncate P^{v.algebra.m} to order {n}')
        return v.algebra.at_order(n).element(v.as_dict())

    def mul(self, u: JetElement, v: JetElement) -> JetElement:
        """Product in P^m, truncated at m"""
        if u.algebra != v.algebra:
            raise DimensionMismatchError(f'{u.algebra!r} and {v.algebra!r} differ')
        P = u.algebra
        R = P.ring
        out = {}
        for a, f in u.terms:
            for b, g in v.terms:
                ab = add(a, b)
                if norm(ab) > P.m:
                    continue
                out[ab] = out.get(ab, R.zero) + f * g * product_factor(P.mode, a, b)
        return P.element(out)

    def taylor(self, f, m: int, mode: str = 'plain') -> JetElement:
        """d¹(f) = Σ H_α(f) ξ^α; in the divided basis the coefficients become α!·H_α(f)"""
        field = ScalarField(int(f.ring.domain.characteristic()))
        return JetAlgebra(f.ring.ngens, m, field, mode).element(taylor_terms(f, m, mode))

    def unit_left(self, f, m: int, mode: str = 'plain') -> JetElement:
        """d⁰(f) = f·𝕀"""
        field = ScalarField(int(f.ring.domain.characteristic()))
        P = JetAlgebra(f.ring.ngens, m, field, mode)
        return P.element({(0,) * P.d: f})

    def counit(self, v: JetElement):
        """Coefficient of 𝕀"""
        return v.coeff((0,) * v.algebra.d)

    def comult(self, v: JetElement, p: int) -> JetTensor:
        """δ^{m,p}: P^m -> P^{m−p} ⊗ P^p"""
        P = v.algebra
        if not 0 <= p <= P.m:
            raise OrderError(f'split order {p} outside 0..{P.m}')
        R = P.ring
        out = {}
        for gamma, f in v.terms:
            for a, b, factor in split_terms(gamma, p, P.m, P.mode):
                out[(a, b)] = out.get((a, b), R.zero) + f * factor
        return JetTensor.build(P.d, (P.m - p, p), P.field, P.mode, out)

    def basis_convert(self, v: JetElement, mode: str) -> JetElement:
        """Rescale between ξ^α and ξ^[α] = ξ^α/α!"""
        if mode not in MODES:
            raise ValueError(f'unknown jet mode {mode!r}')
        P = v.algebra
        if mode == P.mode:
            return v
        try:
            out = {}
            for alpha, f in v.terms:
                fact = multi_factorial(alpha)
                if P.field.is_zero_int(fact):
                    raise NonInvertibleError(f'{alpha}! vanishes in {P.field.name}')
                scale = P.field.integer(fact) if P.mode == 'plain' else P.field.inverse_int(fact)
                out[alpha] = f * scale
            return P.in_mode(mode).element(out)
        except EngineError as e:
            self.logger.error(f"Error converting jet basis: {str(e)}")
            raise

    def tensor_mul(self, u: JetTensor, v: JetTensor) -> JetTensor:
        """Factorwise product in P^{m_1} ⊗ ... ⊗ P^{m_k}"""
        if (u.d, u.orders, u.mode, u.field) != (v.d, v.orders, v.mode, v.field):
            raise DimensionMismatchError('tensor factors differ')
        out = {}
        for key_u, f in u.terms:
            for key_v, g in v.terms:
                key = tuple(add(a, b) for a, b in zip(key_u, key_v))
                if any(norm(a) > m for a, m in zip(key, u.orders)):
                    continue
                factor = 1
                for a, b in zip(key_u, key_v):
                    factor *= product_factor(u.mode, a, b)
                prod = f * g * factor
                out[key] = out[key] + prod if key in out else prod
        return JetTensor.build(u.d, u.orders, u.field, u.mode, out)

    def counit_left(self, t: JetTensor) -> JetElement:
        """(ε ⊗ id) on P^a ⊗ P^b"""
        P = JetAlgebra(t.d, t.orders[1], t.field, t.mode)
        zero = (0,) * t.d
        return P.element({b: f for (a, b), f in t.terms if a == zero})

    def counit_right(self, t: JetTensor) -> JetElement:
        """(id ⊗ ε) on P^a ⊗ P^b"""
        P = JetAlgebra(t.d, t.orders[0], t.field, t.mode)
        zero = (0,) * t.d
        return P.element({a: f for (a, b), f in t.terms if b == zero})

    def comult_left(self, t: JetTensor, q: int) -> JetTensor:
        """(δ ⊗ id) on P^a ⊗ P^b, splitting the first factor as P^{a−q} ⊗ P^q"""
        a_order, b_order = t.orders
        R = JetAlgebra(t.d, a_order, t.field, t.mode).ring
        out = {}
        for (gamma, b), f in t.terms:
            for a1, a2, factor in split_terms(gamma, q, a_order, t.mode):
                key = (a1, a2, b)
                out[key] = out.get(key, R.zero) + f * factor
        return JetTensor.build(t.d, (a_order - q, q, b_order), t.field, t.mode, out)

    def comult_right(self, t: JetTensor, q: int) -> JetTensor:
        """(id ⊗ δ) on P^a ⊗ P^b, splitting the second factor as P^{b−q} ⊗ P^q"""
        a_order, b_order = t.orders
        R = JetAlgebra(t.d, a_order, t.field, t.mode).ring
        out = {}
        for (a, gamma), f in t.terms:
            for b1, b2, factor in split_terms(gamma, q, b_order, t.mode):
                key = (a, b1, b2)
                out[key] = out.get(key, R.zero) + f * factor
        return JetTensor.build(t.d, (a_order, b_order - q, q), t.field, t.mode, out)

    def graded_piece(self, n: int, p: int, d: int) -> GradedJetPiece:
        return GradedJetPiece(d, n, p)
