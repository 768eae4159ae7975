from math import factorial

import pytest

from stratjet.errors import NonInvertibleError, OrderError
from stratjet.models.field import ScalarField
from stratjet.models.forms import Form
from stratjet.models.strat import Connection


@pytest.mark.parametrize('d', [1, 2, 3])
@pytest.mark.parametrize('n', [0, 1, 2, 3, 4, 5])
def test_linearized_derham_is_exact(services, d, n):
    C = services['derham'].linearized_derham_level(n, d)
    assert C.ranks[0] == 1
    assert not any(services['exactcore'].complex_homology_ranks(C))


def test_linearized_derham_ranks(services):
    C = services['derham'].linearized_derham_level(2, 2)
    assert C.ranks == (1, 6, 6, 1)


@pytest.mark.parametrize('d', [1, 2, 3])
@pytest.mark.parametrize('n', [1, 2, 3, 4, 5, 6])
def test_graded_homotopy_contracts(services, d, n):
    C = services['derham'].graded_derham_level(n, d)
    assert services['exactcore'].check_homotopy_identity(C)['pass']


@pytest.mark.parametrize('n', [1, 2, 3, 4])
def test_graded_homotopy_below_the_characteristic(services, n):
    C = services['derham'].graded_derham_level(n, 2, ScalarField(5))
    assert services['exactcore'].check_homotopy_identity(C)['pass']


def test_graded_homotopy_refused_when_n_vanishes(services):
    with pytest.raises(NonInvertibleError):
        services['derham'].graded_homotopy(5, 2, ScalarField(5))
    with pytest.raises(OrderError):
        services['derham'].graded_derham_level(0, 1)


@pytest.mark.parametrize('p', [2, 3, 5])
@pytest.mark.parametrize('d', [1, 2])
def test_divided_linearized_derham_is_exact_in_characteristic_p(services, p, d):
    for n in range(p + 2):
        C = services['derham'].linearized_derham_level(n, d, ScalarField(p), 'divided')
        assert not any(services['exactcore'].complex_homology_ranks(C)), (p, d, n)


def test_plain_derham_fails_in_characteristic_two(services):
    C = services['derham'].linearized_derham_level(2, 1, ScalarField(2))
    assert C.homotopy is None
    assert any(services['exactcore'].complex_homology_ranks(C))


def test_exterior_derivative_squares_to_zero(services, poly):
    derham = services['derham']
    omega = Form.build(3, 0, {(): poly('x1^2*x2*x3 + x3^3', 3)})
    assert derham.exterior_derivative(derham.exterior_derivative(omega)).is_zero()


def test_exterior_derivative_of_a_one_form(services, poly):
    omega = Form.build(2, 1, {(1,): poly('x1', 2)})
    assert services['derham'].exterior_derivative(omega).as_dict() == {(0, 1): poly('1', 2)}


def test_leibniz_rule(services, poly):
    derham = services['derham']
    omega = Form.build(3, 1, {(1,): poly('x1*x3', 3), (2,): poly('x2', 3)})
    tau = Form.build(3, 1, {(0,): poly('x2*x3', 3)})
    lhs = derham.exterior_derivative(derham.wedge(omega, tau))
    rhs = derham.wedge(derham.exterior_derivative(omega), tau) - derham.wedge(omega, derham.exterior_derivative(tau))
    assert lhs == rhs


def test_wedge_is_graded_commutative(services, poly):
    derham = services['derham']
    a = Form.build(2, 1, {(0,): poly('x2', 2)})
    b = Form.build(2, 1, {(1,): poly('x1', 2)})
    assert derham.wedge(a, b) == -derham.wedge(b, a)
    assert derham.wedge(a, a).is_zero()


def test_shuffle_sigma(services):
    sigma = services['derham'].shuffle_sigma((0, 1, 2))
    assert sigma == {((0,), (1, 2)): 2, ((1,), (0, 2)): -2, ((2,), (0, 1)): 2}
    with pytest.raises(OrderError):
        services['derham'].shuffle_sigma(())


def test_derham_complex_shapes(services):
    F = services['derham'].derham_complex(3)
    assert [M.rank for M in F.modules] == [1, 3, 3, 1]
    assert all(D.effective_order == 1 for D in F.operators)


@pytest.mark.parametrize('d', [1, 2])
def test_phi_is_a_chain_map(services, d):
    result = services['derham'].verify_phi_chainmap(services['derham'].derham_complex(d), 2)
    assert result['pass'], result


def test_phi_on_a_twisted_complex(services):
    F = services['derham'].derham_of_connection(Connection.plane_unipotent())
    result = services['derham'].verify_phi_chainmap(F, 1)
    assert result['chain_map']['pass']
    assert result['retraction']['pass']


def test_phi_covariance_under_a_linear_change(services):
    F = services['derham'].derham_complex(2)
    result = services['derham'].phi_covariance(F, [[1, 1], [0, 1]], 1)
    assert result['pass'], result


def test_q0_bicomplex_total_complex(services):
    derham = services['derham']
    B = derham.derham_q0_bicomplex(derham.derham_complex(1), 2, 0)
    C = derham.total_complex(B)
    assert len(C.ranks) == B.max_total + 1
    assert sum(C.ranks) == sum(B.ranks.values())


@pytest.mark.parametrize('name', ['trivial-2', 'nilpotent', 'twist', 'plane-unipotent'])
def test_psi_exactness(services, name):
    conn = services['fixtures'].connection(name)
    M = services['strat'].taylor_stratification(conn, 3)
    result = services['derham'].verify_psi_exactness(M, 2)
    assert result['pass'], result
    assert result['intertwining']['status'] == 'pass'


@pytest.mark.parametrize('char', [0, 3])
def test_psi_divided_checks_the_intertwining(services, char):
    M = services['strat'].taylor_stratification(Connection.nilpotent(ScalarField(char)), 3, 'divided')
    result = services['derham'].verify_psi_exactness(M, 3)
    assert result['pass'], result
    assert result['intertwining']['status'] == 'pass'
    assert {e['method'] for e in result['exactness']} == {'ranks'}


def test_psi_divided_catches_a_perturbed_stratification(services):
    M = services['strat'].taylor_stratification(Connection.nilpotent(), 3, 'divided')
    broken = services['fixtures'].perturbed_strat(M, 2)
    result = services['derham'].verify_psi_exactness(broken, 2)
    assert not result['pass']
    assert result['intertwining']['status'] == 'fail'
    assert {'level': 1, 'p': 0} in result['intertwining']['failures']
    assert all(e['pass'] for e in result['exactness'])


def test_psi_plain_catches_a_perturbed_stratification(services):
    M = services['strat'].taylor_stratification(Connection.nilpotent(), 3)
    result = services['derham'].verify_psi_exactness(services['fixtures'].perturbed_strat(M, 2), 2)
    assert result['intertwining']['status'] == 'fail'


def test_derham_of_strat_matches_the_connection(services):
    conn = Connection.nilpotent()
    M = services['strat'].taylor_stratification(conn, 2)
    F = services['derham'].derham_of_strat(M)
    G = services['derham'].derham_of_connection(conn)
    assert F.operators[0].table() == G.operators[0].table()


@pytest.mark.parametrize('p, levels', [(2, range(4, 7)), (3, range(5, 8))])
def test_divided_linearized_derham_stays_exact_past_the_characteristic(services, p, levels):
    for d in (1, 2):
        for n in levels:
            C = services['derham'].linearized_derham_level(n, d, ScalarField(p), 'divided')
            assert not any(services['exactcore'].complex_homology_ranks(C)), (p, d, n)


@pytest.mark.parametrize('d', [1, 2, 3])
def test_sigma_is_j_factorial_times_eta(services, d):
    derham = services['derham']
    F = derham.derham_complex(d)
    assert derham.verify_sigma_eta(F)['pass']
    top = F.length - 1
    assert derham.sigma_map(F, top, d) == derham.eta_map(F, top, d).scale(factorial(d))


def test_sigma_on_a_twisted_complex(services):
    F = services['derham'].derham_of_connection(Connection.plane_unipotent())
    assert services['derham'].verify_sigma_eta(F)['pass']


def test_sigma_in_characteristic_two_vanishes_with_the_factorial(services):
    derham = services['derham']
    F = derham.derham_complex(2, ScalarField(2))
    assert derham.verify_sigma_eta(F)['pass']
    assert derham.sigma_map(F, 2, 2).is_zero()
    assert not derham.eta_map(F, 2, 2).is_zero()


def test_phi_map_assembles_the_components(services):
    derham = services['derham']
    F = derham.derham_complex(2)
    Phi = derham.phi_map(F, 1, 1)
    # Ω^0 ⊗ P^1 ⊗ F^1 and Ω^1 ⊗ P^1 ⊗ F^0
    assert Phi.shape == (2, 3 * 2 + 2 * 3 * 1)
    first = derham.phi_component(F, 1, 1, 0).matrix((0, 0))
    assert [Phi.column(k) for k in range(first.ncols)] == first.columns()


def test_total_complex_squares_to_zero(services):
    derham = services['derham']
    B = derham.derham_q0_bicomplex(derham.derham_complex(1), 2, 0)
    result = derham.verify_total_complex(B)
    assert result['pass']
    assert result['failed_degrees'] == []
    assert result['total_ranks'] == list(derham.total_complex(B).ranks)
    assert len(result['homology_ranks']) == len(result['total_ranks'])
