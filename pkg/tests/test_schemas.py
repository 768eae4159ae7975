import pytest

from stratjet.errors import FieldError, FixtureError
from stratjet.models.crystal import Thickening
from stratjet.models.field import ScalarField
from stratjet.models.report import CHECKS, CheckRecord, Report
from stratjet.models.strat import Connection
from stratjet.schemas.complex import ChainComplexSchema, complex_schema
from stratjet.schemas.connection import ConnectionSchema, connection_schema
from stratjet.schemas.jet import jet_element_schema
from stratjet.schemas.operator import operator_schema
from stratjet.schemas.report import report_schema, suite_config_schema
from stratjet.schemas.stratification import strat_schema
from stratjet.schemas.thickening import ThickeningSchema, bmatrix_text, thickening_schema


def messages(excinfo):
    return excinfo.value.payload['messages']


# connections

def test_connection_loads_polynomial_matrices(poly):
    conn = connection_schema.load({'d': 2, 'rank': 1, 'name': 'curved', 'A': [[['x2']], [['0']]]})
    assert conn.name == 'curved'
    assert conn.A(1).rows[0][0] == poly('x2', 2)
    assert conn.A(2).is_zero()


def test_connection_dump_is_reloadable():
    document = connection_schema.dump(Connection.nilpotent())
    assert document == {'d': 1, 'rank': 2, 'char': 0, 'name': 'nilpotent', 'A': [[['0', '1'], ['0', '0']]]}
    assert connection_schema.load(document) == Connection.nilpotent()


def test_connection_honors_the_char_key():
    conn = connection_schema.load({'d': 1, 'rank': 1, 'char': 5, 'A': [[['1/2*x1']]]})
    assert conn.field == ScalarField(5)
    assert connection_schema.dump(conn)['A'] == [[['3*x1']]]


def test_connection_uses_the_schema_field_without_char():
    conn = ConnectionSchema(field=ScalarField(3)).load({'d': 1, 'rank': 1, 'A': [[['4']]]})
    assert conn.field == ScalarField(3)
    assert connection_schema.dump(conn)['A'] == [[['1']]]


def test_missing_field_is_a_fixture_error():
    with pytest.raises(FixtureError) as excinfo:
        connection_schema.load({'d': 1, 'rank': 1})
    assert any(m.startswith('A:') for m in messages(excinfo))


def test_wrong_matrix_shape_is_a_fixture_error():
    with pytest.raises(FixtureError) as excinfo:
        connection_schema.load({'d': 1, 'rank': 2, 'A': [[['0']]]})
    assert any('2x2' in m for m in messages(excinfo))


def test_bad_literal_is_a_fixture_error():
    with pytest.raises(FixtureError) as excinfo:
        connection_schema.load({'d': 1, 'rank': 1, 'A': [[['x1 $ 2']]]})
    assert any('position 3' in m for m in messages(excinfo))


def test_bad_characteristic_is_a_fixture_error():
    with pytest.raises(FixtureError):
        connection_schema.load({'d': 1, 'rank': 1, 'char': 4, 'A': [[['0']]]})


# operators

DERIVATIVE = {'source_rank': 1, 'target_rank': 1, 'd': 1, 'bar': [{'alpha': [1], 'matrix': [['1']]}]}


def test_operator_load_and_dump():
    D = operator_schema.load(DERIVATIVE)
    assert D.effective_order == 1
    document = operator_schema.dump(D)
    assert document['bar'] == [{'alpha': [1], 'matrix': [['1']]}]
    assert document['order'] == 1
    assert document['char'] == 0


def test_operator_matrix_shape_is_checked():
    bad = dict(DERIVATIVE, target_rank=2)
    with pytest.raises(FixtureError):
        operator_schema.load(bad)


def test_operator_declared_order_is_checked():
    with pytest.raises(FixtureError):
        operator_schema.load(dict(DERIVATIVE, order=0))


def test_operator_zero_matrices_are_dropped():
    D = operator_schema.load(dict(DERIVATIVE, bar=[{'alpha': [2], 'matrix': [['0']]},
                                                  {'alpha': [0], 'matrix': [['x1']]}]))
    assert D.effective_order == 0
    assert [list(a) for a, _ in D.bar] == [[0]]


# stratifications

def test_stratification_dump_reloads_to_the_same_document(services):
    M = services['strat'].taylor_stratification(Connection.nilpotent(), 2)
    document = strat_schema.dump(M)
    assert document['mode'] == 'plain'
    assert len(document['levels']) == 3
    loaded = strat_schema.load(document)
    assert strat_schema.dump(loaded) == document
    assert services['strat'].verify_stratification(loaded)['pass']


def test_stratification_exponent_above_level_is_rejected():
    with pytest.raises(FixtureError):
        strat_schema.load({'d': 1, 'rank': 1, 'levels': [[{'alpha': [1], 'matrix': [['1']]}]]})


def test_stratification_honors_char_and_mode(services):
    M = services['strat'].taylor_stratification(Connection.nilpotent(ScalarField(2)), 2, 'divided')
    loaded = strat_schema.load(strat_schema.dump(M))
    assert loaded.field == ScalarField(2)
    assert loaded.mode == 'divided'


# thickenings

def test_thickening_loads_sections():
    document = thickening_schema.load({'s': 1, 'nu': 2, 'sections': [{'images': ['2']},
                                                                     {'images': ['2 + 3*t1']}]})
    B = document['thickening']
    assert B == Thickening(1, 2)
    h0, h1 = document['sections']
    assert h0.images == (B.scalar(2),)
    assert h1.images == (B.scalar(2) + B.t(1).scale(3),)


def test_thickening_dump_writes_polynomials_in_t():
    document = thickening_schema.load({'s': 1, 'nu': 2, 'sections': [{'images': ['2 + 3*t1 + t1^3']}]})
    assert thickening_schema.dump(document)['sections'] == [{'images': ['3*t1 + 2']}]


def test_divided_thickening_converts_between_bases():
    document = {'s': 1, 'nu': 2, 'char': 3, 'mode': 'divided', 'sections': [{'images': ['t1^2']}]}
    loaded = thickening_schema.load(document)
    B = loaded['thickening']
    (h,) = loaded['sections'][0].images
    assert h.terms() == [((2,), B.field.convert(2))]
    assert thickening_schema.dump(loaded)['sections'] == [{'images': ['t1^2']}]


def test_thickening_without_sections():
    loaded = ThickeningSchema(field=ScalarField(5)).load({'s': 2, 'nu': 1})
    assert loaded['thickening'].field == ScalarField(5)
    assert loaded['sections'] == ()


def test_thickening_rejects_a_variable_outside_t():
    with pytest.raises(FixtureError):
        thickening_schema.load({'s': 1, 'nu': 1, 'sections': [{'images': ['t2']}]})


def test_comparison_matrix_text(services):
    loaded = thickening_schema.load({'s': 1, 'nu': 1, 'sections': [{'images': ['2']}, {'images': ['2 + 5*t1']}]})
    M = services['strat'].taylor_stratification(Connection.constant_twist(3), 1)
    chi = services['crystal'].comparison_iso(M, *loaded['sections'])
    assert bmatrix_text(chi) == [['15*t1 + 1']]


# dense complexes

def test_complex_dump_reloads_with_its_homotopy(services):
    C = services['derham'].linearized_derham_level(1, 1)
    document = complex_schema.dump(C)
    assert document['ranks'] == [1, 2, 1]
    assert document['homotopy'][0] == []
    loaded = complex_schema.load(document)
    assert loaded == C
    assert services['exactcore'].check_homotopy_identity(loaded)['pass']


def test_complex_without_homotopy(services):
    C = services['derham'].linearized_derham_level(2, 1, ScalarField(2))
    document = ChainComplexSchema(field=ScalarField(2)).dump(C)
    assert document['homotopy'] is None
    assert complex_schema.load(document).homotopy is None


def test_complex_rejects_a_nonzero_square():
    with pytest.raises(FixtureError):
        complex_schema.load({'ranks': [1, 1, 1], 'matrices': [[['1']], [['1']]]})


def test_complex_rejects_a_wrong_shape():
    with pytest.raises(FixtureError) as excinfo:
        complex_schema.load({'ranks': [1, 2], 'matrices': [[['1']]]})
    assert any('2x1' in m for m in messages(excinfo))


def test_complex_rejects_a_bad_scalar():
    with pytest.raises(FixtureError):
        complex_schema.load({'ranks': [1, 1], 'matrices': [[['x1']]]})


def test_complex_scalars_are_read_in_the_file_field():
    C = complex_schema.load({'char': 5, 'ranks': [1, 1], 'matrices': [[['1/2']]]})
    assert complex_schema.dump(C)['matrices'] == [[['3']]]


# jet elements

def test_jet_element_truncates_and_dumps(poly):
    v = jet_element_schema.load({'m': 2, 'd': 1, 'terms': [{'alpha': [1], 'coeff': 'x1'},
                                                            {'alpha': [1], 'coeff': '1'},
                                                            {'alpha': [3], 'coeff': '5'}]})
    assert v.algebra.m == 2
    assert v.coeff((1,)) == poly('x1 + 1', 1)
    assert v.coeff((3,)) == 0
    assert jet_element_schema.dump(v) == {'mode': 'plain', 'm': 2, 'd': 1, 'char': 0,
                                          'terms': [{'alpha': [1], 'coeff': 'x1 + 1'}]}


def test_jet_element_exponent_length_is_checked():
    with pytest.raises(FixtureError):
        jet_element_schema.load({'m': 1, 'd': 2, 'terms': [{'alpha': [1], 'coeff': '1'}]})


# reports and suite configs

def test_report_keys_are_ordered():
    report = Report('1.0', {'char': 0}, [CheckRecord('poincare', {'d': 1}, 'pass'),
                                         CheckRecord('strat', {'fixture': 'twist'}, 'fail', expected_fail=True)])
    document = report_schema.dump(report)
    assert list(document) == ['schema_version', 'config', 'summary', 'exit_code', 'records']
    assert document['summary'] == {'pass': 1, 'fail': 1, 'flag': 0, 'expected_fail': 1}
    assert document['exit_code'] == 0
    assert 'run_id' not in document


def test_report_loads_back():
    report = Report('1.0', {}, [CheckRecord('phi', {'d': 2}, 'flag', {'reason': 'refused'})])
    loaded = report_schema.load(report_schema.dump(report))
    assert loaded.records == report.records
    assert loaded.schema_version == '1.0'


def test_report_rejects_an_unknown_status():
    with pytest.raises(FixtureError):
        report_schema.load({'schema_version': '1.0', 'records': [{'check': 'phi', 'status': 'maybe'}]})


def test_suite_config_defaults():
    config = suite_config_schema.load({})
    assert config.characteristic == 0
    assert config.dims == (1, 2)
    assert config.levels == (0, 1, 2, 3)
    assert config.degree_bounds == (0, 1, 2)
    assert config.checks == CHECKS
    assert config.workers == 1
    assert config.seed == 1729


def test_suite_config_reads_char():
    config = suite_config_schema.load({'char': 5, 'dims': [1], 'checks': ['poincare']})
    assert config.field == ScalarField(5)
    assert config.dims == (1,)
    assert config.checks == ('poincare',)


@pytest.mark.parametrize('document', [
    {'char': 4},
    {'dims': [4]},
    {'checks': ['bogus']},
    {'dims': []},
    {'workers': 0},
])
def test_suite_config_rejections(document):
    with pytest.raises(FixtureError):
        suite_config_schema.load(document)


def test_suite_config_field_error_is_reported_as_a_message():
    with pytest.raises(FixtureError) as excinfo:
        suite_config_schema.load({'char': 9})
    assert not isinstance(excinfo.value, FieldError)
    assert any('prime' in m for m in messages(excinfo))
