import json

import pytest

from src.core.diagnostics import (
    CATALOG,
    CompileError,
    Diagnostic,
    categories_of,
    category_for,
    make_diagnostic,
    parse_record,
    render_diagnostic,
    to_json_lines,
)


@pytest.mark.parametrize('code, category', [
    ('E_CP_SYNTAX_UNEXPECTED_TOKEN', 'CSE'),
    ('E_GEOM_TOO_MANY_LAYERS', 'GIF'),
    ('E_PHYS_SELF_INTERSECTION', 'PSI'),
    ('E_AMBIGUOUS_LAYER_ORDER', 'AFS'),
])
def test_category_follows_prefix(code, category):
    assert category_for(code) == category
    assert make_diagnostic(code).category == category


def test_catalog_has_all_eighteen_codes():
    assert len(CATALOG) == 18
    assert {category_for(code) for code in CATALOG} == {'CSE', 'GIF', 'PSI', 'AFS'}


def test_unknown_code_rejected():
    with pytest.raises(ValueError):
        make_diagnostic('E_GEOM_NOT_A_CODE')


def test_category_mismatch_rejected():
    with pytest.raises(ValueError):
        Diagnostic('PSI', 'E_GEOM_TOO_MANY_LAYERS', 'msg')


def test_undocumented_parameter_rejected():
    with pytest.raises(ValueError):
        make_diagnostic('E_GEOM_TOO_MANY_LAYERS', colour='red')


def test_render_layer_cap_line():
    d = make_diagnostic(
        'E_GEOM_TOO_MANY_LAYERS',
        problematic_coordinates_or_regions=[0.5, 0.5],
        calculated_layers_at_point=70,
        max_allowable_layers=64,
    )
    line, record = render_diagnostic(d)
    assert line.startswith('GIF/E_GEOM_TOO_MANY_LAYERS: ')
    assert '70 paper layers' in line
    assert line.endswith(
        '{calculated_layers_at_point=70, max_allowable_layers=64, '
        'problematic_coordinates_or_regions=[0.5, 0.5]}'
    )
    assert list(record['params']) == sorted(record['params'])
    assert record['text'] == line


def test_unexpected_token_message():
    d = make_diagnostic('E_CP_SYNTAX_UNEXPECTED_TOKEN', token='}', line=3, column=7,
                        command='document')
    assert 'line 3, column 7' in d.message


def test_missing_placeholder_prints_question_mark():
    d = make_diagnostic('E_AMBIGUOUS_LAYER_ORDER', layer_a_id=1)
    assert 'layers 1 and ?' in d.message


def test_tuples_become_lists():
    d = make_diagnostic('E_GEOM_CREASE_PLACEMENT_INVALID', faulty_crease_ids=(3, 4))
    assert d.params['faulty_crease_ids'] == [3, 4]


def test_record_round_trip():
    d = make_diagnostic('E_PHYS_SELF_INTERSECTION', faulty_crease_ids=[1],
                        intersecting_facet_ids=[0, 2])
    record = json.loads(json.dumps(render_diagnostic(d)[1]))
    assert parse_record(record) == d


def test_json_lines_one_record_per_line():
    diags = [make_diagnostic('E_AMBIGUOUS_STATE'), make_diagnostic('E_PHYS_BOUNDARY_VIOLATION')]
    lines = to_json_lines(diags).splitlines()
    assert [json.loads(line)['code'] for line in lines] == [
        'E_AMBIGUOUS_STATE', 'E_PHYS_BOUNDARY_VIOLATION']


def test_categories_ignore_notes():
    diags = [
        make_diagnostic('E_CP_SYNTAX_INVALID_PARAM_TYPE', severity='note'),
        make_diagnostic('E_AMBIGUOUS_STATE'),
        make_diagnostic('E_GEOM_TOO_MANY_LAYERS'),
    ]
    assert categories_of(diags) == ['GIF', 'AFS']


def test_compile_error_carries_diagnostics():
    d = make_diagnostic('E_AMBIGUOUS_STATE', number_of_possible_states=2)
    error = CompileError([d])
    assert error.diagnostics == (d,)
    assert error.categories == ['AFS']
    assert 'AFS/E_AMBIGUOUS_STATE' in str(error)
