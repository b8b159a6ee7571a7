import xml.etree.ElementTree as ET

from src.core.folder import export_state, fold
from src.core.render import SVG_NS, render_cp, render_export, render_state
from tests.conftest import GOLDEN


def _elements(svg, tag):
    return ET.fromstring(svg).iter(f'{{{SVG_NS}}}{tag}')


def test_cp_render_is_deterministic(half):
    assert render_cp(half) == render_cp(half)


def test_square_has_four_boundary_strokes(square):
    lines = list(_elements(render_cp(square), 'line'))
    assert len(lines) == 4
    assert {line.get('data-assignment') for line in lines} == {'B'}
    assert {line.get('stroke') for line in lines} == {'#000000'}


def test_crease_styles_follow_assignment(half):
    lines = list(_elements(render_cp(half), 'line'))
    (crease,) = [line for line in lines if line.get('data-assignment') == 'V']
    assert crease.get('stroke-dasharray') == '6 4'
    assert [line.get('data-edge') for line in lines] == [str(e) for e in range(half.num_edges)]


def test_folded_render_draws_each_face_once(half):
    svg = render_state(fold(half))
    faces = list(_elements(svg, 'polygon'))
    assert sorted(f.get('data-face') for f in faces) == ['0', '1']
    assert sorted(f.get('data-layer') for f in faces) == ['0', '1']
    creases = list(_elements(svg, 'line'))
    assert len(creases) == 1


def test_export_render(half):
    document = export_state(fold(GOLDEN['four_panel_vmv']))
    svg = render_export(document)
    cells = list(_elements(svg, 'polygon'))
    assert len(cells) == len(document['CF'])
    assert len(list(_elements(svg, 'line'))) == len(document['SP'])
    assert render_export(document) == svg


def test_empty_export_still_renders():
    svg = render_export({'P': [], 'SP': [], 'CF': []})
    assert svg.startswith('<svg')
