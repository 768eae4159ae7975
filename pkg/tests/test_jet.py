import pytest
from hypothesis import given, settings, strategies as st

from stratjet.errors import DimensionMismatchError, NonInvertibleError, OrderError
from stratjet.models.field import ScalarField
from stratjet.models.jet import JetAlgebra, JetTensor
from stratjet.models.poly import multi_factorial, multi_indices, poly_ring
from stratjet.services.jet_service import JetService

jets = JetService()

exponents = st.tuples(st.integers(0, 3), st.integers(0, 3))
small_polys = st.dictionaries(exponents, st.integers(-3, 3), max_size=4).map(
    lambda terms: poly_ring(2).from_dict(terms))


def jet_elements(m, mode='plain'):
    P = JetAlgebra(2, m, ScalarField(0), mode)
    return st.dictionaries(st.sampled_from(P.basis), small_polys, max_size=4).map(P.element)


def test_taylor_of_a_monomial(poly):
    v = jets.taylor(poly('x1^2', 1), 2)
    assert v.as_dict() == {(0,): poly('x1^2', 1), (1,): poly('2*x1', 1), (2,): poly('1', 1)}


def test_taylor_in_the_divided_basis(poly):
    v = jets.taylor(poly('x1^3', 1), 3, 'divided')
    assert v.coeff((2,)) == poly('6*x1', 1)
    assert v.coeff((3,)) == poly('6', 1)


def test_divided_product_rule():
    P = JetAlgebra(1, 3, ScalarField(0), 'divided')
    xi = P.xi(1)
    assert jets.mul(xi, xi) == P.monomial((2,), P.ring(2))
    assert jets.mul(jets.mul(xi, xi), xi) == P.monomial((3,), P.ring(6))


def test_products_truncate():
    P = JetAlgebra(2, 1)
    assert jets.mul(P.xi(1), P.xi(2)).is_zero()


def test_mixed_algebras_are_rejected():
    with pytest.raises(DimensionMismatchError):
        jets.mul(JetAlgebra(1, 1).unit(), JetAlgebra(1, 2).unit())


@settings(max_examples=30, deadline=None)
@given(small_polys, small_polys)
def test_taylor_is_multiplicative(f, g):
    for mode in ('plain', 'divided'):
        assert jets.taylor(f * g, 3, mode) == jets.mul(jets.taylor(f, 3, mode), jets.taylor(g, 3, mode))


@settings(max_examples=30, deadline=None)
@given(jet_elements(4), st.integers(0, 2), st.integers(0, 2))
def test_comultiplication_is_coassociative(v, p, q):
    lhs = jets.comult_left(jets.comult(v, p), q)
    rhs = jets.comult_right(jets.comult(v, p + q), p)
    assert lhs == rhs


@settings(max_examples=30, deadline=None)
@given(jet_elements(3, 'divided'), st.integers(0, 1), st.integers(0, 2))
def test_divided_comultiplication_is_coassociative(v, p, q):
    lhs = jets.comult_left(jets.comult(v, p), q)
    rhs = jets.comult_right(jets.comult(v, p + q), p)
    assert lhs == rhs


@settings(max_examples=30, deadline=None)
@given(jet_elements(3), st.integers(0, 3))
def test_counits_recover_truncations(v, p):
    t = jets.comult(v, p)
    assert jets.counit_right(t) == jets.truncate(v, 3 - p)
    assert jets.counit_left(t) == jets.truncate(v, p)


@settings(max_examples=25, deadline=None)
@given(jet_elements(3), jet_elements(3), st.integers(0, 3))
def test_comultiplication_is_an_algebra_map(u, v, p):
    assert jets.comult(jets.mul(u, v), p) == jets.tensor_mul(jets.comult(u, p), jets.comult(v, p))


def test_comult_split_order_out_of_range():
    with pytest.raises(OrderError):
        jets.comult(JetAlgebra(1, 2).unit(), 3)


def test_truncate_drops_high_terms():
    P = JetAlgebra(1, 3)
    v = P.element({(0,): 1, (2,): 5, (3,): 1})
    assert jets.truncate(v, 2).as_dict() == {(0,): P.ring(1), (2,): P.ring(5)}
    with pytest.raises(OrderError):
        jets.truncate(v, 4)


def test_counit_is_the_constant_coefficient(poly):
    assert jets.counit(jets.taylor(poly('x1*x2 + 4', 2), 2)) == poly('x1*x2 + 4', 2)


def test_basis_convert_round_trip():
    P = JetAlgebra(2, 3)
    v = P.element({a: i + 1 for i, a in enumerate(multi_indices(2, 3))})
    divided = jets.basis_convert(v, 'divided')
    assert divided.coeff((2, 1)) == P.ring(2 * v.coeff((2, 1)))
    assert jets.basis_convert(divided, 'plain') == v


def test_basis_convert_needs_invertible_factorials():
    P = JetAlgebra(1, 2, ScalarField(2), 'divided')
    with pytest.raises(NonInvertibleError):
        jets.basis_convert(P.monomial((2,)), 'plain')


def test_graded_piece_rank():
    assert jets.graded_piece(2, 1, 2).rank == 6
    assert jets.graded_piece(1, 3, 2).rank == 0


def to_divided(t):
    """ξ^a ⊗ ξ^b = a!·b!·ξ^[a] ⊗ ξ^[b]"""
    out = {}
    for key, c in t.terms:
        scale = 1
        for a in key:
            scale *= multi_factorial(a)
        out[key] = c * scale
    return JetTensor.build(t.d, t.orders, t.field, 'divided', out)


@settings(max_examples=30, deadline=None)
@given(small_polys)
def test_basis_convert_carries_taylor_expansions(f):
    assert jets.basis_convert(jets.taylor(f, 3), 'divided') == jets.taylor(f, 3, 'divided')


@settings(max_examples=30, deadline=None)
@given(jet_elements(3), jet_elements(3))
def test_basis_convert_is_multiplicative(u, v):
    lhs = jets.basis_convert(jets.mul(u, v), 'divided')
    assert lhs == jets.mul(jets.basis_convert(u, 'divided'), jets.basis_convert(v, 'divided'))
    assert jets.basis_convert(lhs, 'plain') == jets.mul(u, v)


@settings(max_examples=30, deadline=None)
@given(jet_elements(3), st.integers(0, 3))
def test_basis_convert_commutes_with_comultiplication(v, p):
    assert to_divided(jets.comult(v, p)) == jets.comult(jets.basis_convert(v, 'divided'), p)
