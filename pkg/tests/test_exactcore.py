import pytest
from hypothesis import given, settings, strategies as st
from sympy import QQ

from stratjet.errors import DimensionMismatchError, ShapeError
from stratjet.models.complex import ChainComplex
from stratjet.models.field import ScalarField
from stratjet.models.matrix import Matrix
from stratjet.models.poly import add, hasse, multi_binomial, multi_factorial, poly_ring


def test_hasse_derivatives(services, poly):
    core = services['exactcore']
    assert core.hasse_derivative(poly('x1^3', 1), (2,)) == poly('3*x1', 1)
    assert core.hasse_derivative(poly('x1^3', 1), (0,)) == poly('x1^3', 1)
    assert core.hasse_derivative(poly('x1^2*x2', 2), (1, 1)) == poly('2*x1', 2)


def test_hasse_derivative_survives_where_the_ordinary_one_vanishes(services, poly):
    f = poly('x1^2', 1, char=2)
    assert services['exactcore'].hasse_derivative(f, (1,)) == 0
    assert services['exactcore'].hasse_derivative(f, (2,)) == poly('1', 1, char=2)


def test_hasse_derivative_rejects_bad_exponents(services, poly):
    with pytest.raises(ShapeError):
        services['exactcore'].hasse_derivative(poly('x1', 1), (-1,))
    with pytest.raises(DimensionMismatchError):
        services['exactcore'].hasse_derivative(poly('x1', 1), (1, 0))


def test_homology_ranks(services):
    field = ScalarField(0)
    one = Matrix.from_rows([[1]], QQ)
    zero = Matrix.from_rows([[0]], QQ)
    assert services['exactcore'].complex_homology_ranks(ChainComplex((1, 1), (one,), field)) == [0, 0]
    assert services['exactcore'].complex_homology_ranks(ChainComplex((1, 1), (zero,), field)) == [1, 1]


def test_homotopy_identity(services):
    field = ScalarField(0)
    one = Matrix.from_rows([[1]], QQ)
    s = (Matrix.zeros(0, 1, QQ), one)
    C = ChainComplex((1, 1), (one,), field, s)
    assert services['exactcore'].check_homotopy_identity(C)['pass']
    bad = C.with_homotopy((Matrix.zeros(0, 1, QQ), one.scale(QQ(2))))
    result = services['exactcore'].check_homotopy_identity(bad)
    assert not result['pass']
    assert result['positions'][0]['mismatches'] == [[0, 0]]


def test_homotopy_identity_needs_a_homotopy(services):
    C = ChainComplex((1,), (), ScalarField(0))
    with pytest.raises(ShapeError):
        services['exactcore'].check_homotopy_identity(C)


def test_change_of_basis_keeps_homology(services):
    derham = services['derham']
    C = derham.linearized_derham_level(2, 2)
    P = Matrix.identity(C.ranks[2], QQ)
    P = P + Matrix.from_entries({(0, 1): QQ(3)}, *P.shape, QQ)
    D = services['exactcore'].change_of_basis(C, 2, P)
    assert services['exactcore'].complex_homology_ranks(D) == [0] * len(C.ranks)
    with pytest.raises(DimensionMismatchError):
        services['exactcore'].change_of_basis(C, 2, Matrix.identity(1, QQ))


def test_klinearize_derham(services):
    F = services['derham'].derham_complex(1)
    C = services['exactcore'].klinearize(F, 2)
    assert C.ranks == (3, 3)
    assert services['exactcore'].complex_homology_ranks(C) == [1, 1]


def test_stable_kernel_of_a_constant_tower(services):
    K = Matrix.from_rows([[1, 0]], QQ)
    T = Matrix.identity(2, QQ)
    result = services['exactcore'].stable_kernel([K, K, K], [T, T], 0, 1)
    assert result['dimension'] == 1
    assert result['stabilized']
    with pytest.raises(ShapeError):
        services['exactcore'].stable_kernel([K, K], [T], 1, 1)


def test_stable_kernel_of_an_injective_tower(services):
    K = Matrix.identity(2, QQ)
    result = services['exactcore'].stable_kernel([K, K, K], [K, K], 0, 1, [K, K])
    assert result['dimension'] == 0
    assert result['basis'] == []
    assert result['stabilized']


def test_stable_kernel_of_a_zero_tower(services):
    Z = Matrix.zeros(1, 2, QQ)
    T = Matrix.identity(2, QQ)
    result = services['exactcore'].stable_kernel([Z, Z, Z], [T, T], 0, 1, [Matrix.identity(1, QQ)] * 2)
    assert result['dimension'] == 2
    assert result['dimensions'] == [2, 2]
    assert result['stabilized']


def test_stable_kernel_rejects_a_square_that_does_not_commute(services):
    K = Matrix.from_rows([[1, 0]], QQ)
    T = Matrix.identity(2, QQ)
    with pytest.raises(ShapeError):
        services['exactcore'].stable_kernel([K, K, K], [T, T], 0, 1, [Matrix.from_rows([[2]], QQ)] * 2)


small_exponents = st.tuples(st.integers(0, 2), st.integers(0, 2))


def polys_over(char):
    return st.dictionaries(st.tuples(st.integers(0, 4), st.integers(0, 4)), st.integers(-5, 5),
                           max_size=5).map(lambda terms: poly_ring(2, char).from_dict(terms))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([0, 2, 3]).flatmap(polys_over), small_exponents, small_exponents)
def test_hasse_derivatives_compose_with_a_binomial(f, a, b):
    lhs = hasse(hasse(f, b), a)
    assert lhs == hasse(f, add(a, b)) * multi_binomial(add(a, b), a)


@settings(max_examples=40, deadline=None)
@given(polys_over(0), small_exponents)
def test_scaled_hasse_derivative_is_the_ordinary_one(f, alpha):
    g = f
    for j, times in enumerate(alpha):
        for _ in range(times):
            g = g.diff(g.ring.gens[j])
    assert hasse(f, alpha) * multi_factorial(alpha) == g
