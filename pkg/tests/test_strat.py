from math import comb

import pytest

from stratjet.errors import FlatnessError, NonInvertibleError, OrderError
from stratjet.models.field import ScalarField
from stratjet.models.matrix import Matrix
from stratjet.models.module import FreeModule
from stratjet.models.strat import Connection, InducedTower


def test_flatness_check(services):
    strat = services['strat']
    assert strat.flatness_check(Connection.plane_unipotent())['pass']
    curved = strat.flatness_check(Connection.plane_curved())
    assert not curved['pass']
    assert curved['offending'] == [1, 2]


def test_curved_connection_has_no_taylor_stratification(services):
    with pytest.raises(FlatnessError):
        services['strat'].taylor_stratification(Connection.plane_curved(), 2)


@pytest.mark.parametrize('mode', ['plain', 'divided'])
def test_taylor_stratifications_verify(services, catalog, mode):
    for conn in catalog:
        M = services['strat'].taylor_stratification(conn, 3, mode)
        result = services['strat'].verify_stratification(M)
        assert result['pass'], (conn.name, result)


def test_twist_taylor_coefficients(services):
    M = services['strat'].taylor_stratification(Connection.constant_twist(3), 2)
    R = M.module.poly_domain
    assert M.matrix(2, (1,)) == Matrix.from_rows([[3]], R)
    assert M.matrix(2, (2,)) == Matrix.from_rows([[ScalarField(0).ratio(9, 2)]], R)


def test_divided_stratification_in_characteristic_two(services):
    conn = Connection.nilpotent(ScalarField(2))
    with pytest.raises(NonInvertibleError):
        services['strat'].taylor_stratification(conn, 2, 'plain')
    M = services['strat'].taylor_stratification(conn, 3, 'divided')
    assert services['strat'].verify_stratification(M)['pass']


def test_extract_connection_round_trip(services, catalog):
    for conn in catalog:
        M = services['strat'].taylor_stratification(conn, 2)
        assert services['strat'].extract_connection(M).matrices == conn.matrices


def test_extract_connection_needs_level_one(services):
    M = services['strat'].taylor_stratification(Connection.nilpotent(), 0)
    with pytest.raises(OrderError):
        services['strat'].extract_connection(M)


def test_perturbed_stratification_fails_coassociativity(services):
    M = services['strat'].taylor_stratification(Connection.nilpotent(), 3)
    broken = services['fixtures'].perturbed_strat(M, 2)
    result = services['strat'].verify_stratification(broken)
    assert not result['pass']
    assert not result['co_associativity']['pass']
    assert result['co_identity']['pass']


def test_truncation_compatibility_is_checked(services):
    M = services['strat'].taylor_stratification(Connection.constant_twist(3), 2)
    table = M.table(1)
    table[(1,)] = table[(1,)].scale(2)
    result = services['strat'].verify_stratification(M.with_level(1, table))
    assert not result['compatibility']['pass']


def test_identity_is_a_morphism(services):
    M = services['strat'].taylor_stratification(Connection.plane_unipotent(), 2)
    F = Matrix.identity(2, M.module.poly_domain)
    assert services['strat'].verify_strat_morphism(F, M, M)['pass']
    assert not services['strat'].verify_strat_morphism(F.scale(M.module.ring.gens[0]), M, M)['pass']


def test_horizontal_sections_of_the_nilpotent_connection(services):
    M = services['strat'].taylor_stratification(Connection.nilpotent(), 1)
    low = services['strat'].horizontal_sections(M, 0)
    assert low.dimension == 1
    assert not low.stabilized
    high = services['strat'].horizontal_sections(M, 1)
    assert high.dimension == 2
    assert high.stabilized


def test_twist_has_no_polynomial_horizontal_sections(services):
    M = services['strat'].taylor_stratification(Connection.constant_twist(3), 1)
    assert services['strat'].horizontal_sections(M, 2).dimension == 0


@pytest.mark.parametrize('d, bound', [(1, 0), (1, 2), (2, 1), (2, 2)])
def test_induced_horizontal_sections(services, d, bound):
    tower = services['strat'].induced_stratification(FreeModule(d, 1), bound + 2)
    H = services['strat'].horizontal_sections(tower, bound)
    assert H.dimension == comb(bound + d, d)
    assert H.stabilized


def test_induced_stratification_verifies(services):
    for mode in ('plain', 'divided'):
        tower = InducedTower(FreeModule(2, 1), 3, mode)
        assert services['strat'].verify_induced_stratification(tower)['pass']


def test_negative_degree_bound(services):
    M = services['strat'].taylor_stratification(Connection.trivial(), 1)
    with pytest.raises(OrderError):
        services['strat'].horizontal_sections(M, -1)


def test_stratified_endomorphisms_of_the_induced_tower(services):
    result = services['strat'].strat_endomorphisms(1, 1, 2, 1)
    assert result['pass'], result
    assert result['dimension'] == 2


JORDAN = [[[0, 1, 0], [0, 0, 1], [0, 0, 0]]]


@pytest.mark.parametrize('char, mode', [(0, 'plain'), (0, 'divided'), (3, 'divided')])
def test_horizontal_section_is_a_morphism_from_the_trivial_module(services, poly, char, mode):
    field = ScalarField(char)
    jordan = Connection.from_rows(1, JORDAN, field, 'jordan')
    source = services['strat'].taylor_stratification(Connection.trivial(1, 1, field), 2, mode)
    target = services['strat'].taylor_stratification(jordan, 2, mode)
    # ∂F + AF = 0 for F = (x²/2, −x, 1)
    F = Matrix.from_rows([[poly('1/2*x1^2', 1, char)], [poly('-x1', 1, char)], [poly('1', 1, char)]],
                         target.module.poly_domain)
    result = services['strat'].verify_strat_morphism(F, source, target)
    assert result['pass'], result


@pytest.mark.parametrize('mode', ['plain', 'divided'])
def test_inclusion_of_the_first_basis_vector(services, mode):
    source = services['strat'].taylor_stratification(Connection.trivial(), 2, mode)
    target = services['strat'].taylor_stratification(Connection.nilpotent(), 2, mode)
    R = target.module.poly_domain
    assert services['strat'].verify_strat_morphism(Matrix.from_rows([[1], [0]], R), source, target)['pass']
    result = services['strat'].verify_strat_morphism(Matrix.from_rows([[0], [1]], R), source, target)
    assert not result['pass']
    assert result['defects'][0] == {'level': 1, 'alpha': [1]}


@pytest.mark.parametrize('char, mode', [(0, 'plain'), (2, 'divided')])
def test_induced_horizontal_sections_in_both_bases(services, char, mode):
    tower = services['strat'].induced_stratification(FreeModule(2, 1, ScalarField(char)), 3, mode)
    H = services['strat'].horizontal_sections(tower, 1)
    assert H.dimension == 3
    assert H.stabilized
