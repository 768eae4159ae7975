from random import Random

import pytest

from stratjet.errors import DimensionMismatchError, OrderError
from stratjet.models.field import ScalarField
from stratjet.models.matrix import Matrix
from stratjet.models.module import DiffOperator, FreeModule

L = FreeModule(1, 1)


def derivative(module=L, j=0):
    alpha = tuple(1 if i == j else 0 for i in range(module.d))
    return DiffOperator.from_table(module, module, {alpha: Matrix.identity(module.rank, module.poly_domain)}, 1)


def constant_matrix(rows, module=L):
    return Matrix.from_rows(rows, module.poly_domain)


def test_apply_uses_hasse_derivatives(poly):
    assert derivative().apply((poly('x1^3', 1),)) == (poly('3*x1^2', 1),)


def test_compose_second_derivative(services):
    D = derivative()
    DD = services['diffop'].compose(D, D)
    assert DD.table() == {(2,): constant_matrix([[2]])}
    assert DD.effective_order == 2


def test_compose_rejects_mismatched_modules(services):
    with pytest.raises(DimensionMismatchError):
        services['diffop'].compose(derivative(FreeModule(1, 2)), derivative())


@pytest.mark.parametrize('d, seed', [(1, 3), (1, 8), (2, 5), (2, 11)])
def test_compose_agrees_with_sequential_application(services, d, seed):
    D1, D2 = services['fixtures'].operator_pair(d, seed)
    composite = services['diffop'].compose(D2, D1)
    R = D1.source.ring
    rng = Random(seed)
    x = R.gens
    for _ in range(3):
        s = tuple(sum((x[i] ** rng.randint(0, 3) * rng.randint(-2, 2) for i in range(d)), R.zero)
                  for _ in range(D1.source.rank))
        assert composite.apply(s) == D2.apply(D1.apply(s))


def test_linearize_derivative_at_level_one(services):
    Q = services['diffop'].linearize(derivative(), 1)
    assert Q == constant_matrix([[0, 1, 0], [0, 0, 2]])


def test_linearize_derivative_in_the_divided_basis(services):
    Q = services['diffop'].linearize(derivative(), 1, mode='divided')
    assert Q == constant_matrix([[0, 1, 0], [0, 0, 1]])
    DD = services['diffop'].compose(derivative(), derivative())
    assert services['diffop'].linearize(DD, 0, mode='divided') == constant_matrix([[0, 0, 1]])


@pytest.mark.parametrize('d, seed', [(1, 2), (2, 4)])
def test_divided_linearization_is_functorial(services, d, seed):
    diffop = services['diffop']
    D1, D2 = services['fixtures'].operator_pair(d, seed)
    s1, s2 = D1.effective_order, D2.effective_order
    composite = diffop.compose(D2, D1)
    for n in range(3):
        lhs = diffop.linearize(composite, n, s1 + s2, 'divided')
        assert lhs == diffop.linearize(D2, n, s2, 'divided') @ diffop.linearize(D1, n + s2, s1, 'divided')


def test_linearize_rejects_small_shift(services):
    with pytest.raises(OrderError):
        services['diffop'].linearize(derivative(), 0, shift=0)
    with pytest.raises(OrderError):
        services['diffop'].linearize(derivative(), -1)


@pytest.mark.parametrize('d, seed', [(1, 1), (1, 2), (2, 1), (2, 4), (3, 7)])
def test_linearization_is_functorial(services, d, seed):
    D1, D2 = services['fixtures'].operator_pair(d, seed)
    result = services['diffop'].verify_functoriality(D2, D1, 2)
    assert result['pass'], result
    assert result['counit_collapse']


def test_counit_collapse_recovers_the_bar(services):
    D = derivative(FreeModule(2, 1), 1)
    assert services['diffop'].counit_collapse(D).table() == D.table()
    wide = services['diffop'].counit_collapse(D, shift=2)
    assert wide.table() == D.table()


def test_linearize_promap_commutes_with_truncations(services):
    D1, _ = services['fixtures'].operator_pair(2, 9)
    g = services['diffop'].linearize_promap(D1, 2)
    assert len(g.levels) == 3
    assert services['diffop'].promap_equal(g, g)


def test_promap_equality_across_shifts(services):
    diffop = services['diffop']
    D = derivative()
    assert diffop.promap_equal(diffop.linearize_promap(D, 2), diffop.linearize_promap(D, 2, shift=2))


def test_order1_parts_round_trip(services):
    diffop = services['diffop']
    F = services['derham'].derham_complex(2)
    D = F.operators[0]
    d_F, d_x = diffop.extract_order1_parts(D)
    rebuilt = diffop.assemble_order1(D.source, D.target, d_F, d_x)
    assert rebuilt.table() == D.table()
    with pytest.raises(OrderError):
        diffop.extract_order1_parts(diffop.compose(derivative(), derivative()))


@pytest.mark.parametrize('d', [1, 2, 3])
def test_order1_relations_hold_on_derham(services, d):
    result = services['diffop'].verify_order1_relations(services['derham'].derham_complex(d))
    assert result['pass']
    assert all(degree['composite_vanishes'] for degree in result['degrees'])


def test_order1_relations_hold_on_flat_connections(services, catalog):
    for conn in catalog:
        F = services['derham'].derham_of_connection(conn)
        assert services['diffop'].verify_order1_relations(F)['pass'], conn.name


def test_order1_relations_catch_the_corrupted_complex(services):
    result = services['diffop'].verify_order1_relations(services['fixtures'].corrupted_complex())
    assert not result['pass']
    first = result['degrees'][0]
    assert {'relation': 'iii', 'j': 1, 'k': 2} in first['failures']
    assert not first['composite_vanishes']


def test_from_action_recovers_an_operator(services):
    D1, _ = services['fixtures'].operator_pair(2, 6)
    rebuilt = services['diffop'].from_action(D1.apply, D1.source, D1.target, max(D1.effective_order, 1))
    assert rebuilt.table() == D1.table()


def test_change_coordinates_scales_the_derivative(services, poly):
    moved = services['diffop'].change_coordinates(derivative(), [[2]])
    assert moved.apply((poly('x1^3', 1),)) == (poly('3/2*x1^2', 1),)


def test_change_coordinates_in_characteristic_p(services):
    field = ScalarField(5)
    M = FreeModule(2, 1, field)
    D = derivative(M, 0)
    moved = services['diffop'].change_coordinates(D, [[1, 1], [0, 1]])
    back = services['diffop'].change_coordinates(moved, [[1, 4], [0, 1]])
    assert back.table() == D.table()
