"""
Render module - deterministic SVG drawings of crease patterns and folded states.

Same input, same bytes: element order follows ids and every coordinate is
printed with fixed precision.
"""

import xml.etree.ElementTree as ET
from typing import Dict, Iterable, List, Sequence, Tuple

from src.core.cp_model import CreasePattern
from src.core.folder import FoldedState

SVG_NS = 'http://www.w3.org/2000/svg'
SIZE = 400.0
MARGIN = 20.0
# px shift per layer in folded drawings
LAYER_OFFSET = 3.0

EDGE_STYLES: Dict[str, Dict[str, str]] = {
    'B': {'stroke': '#000000', 'stroke-width': '2'},
    'M': {'stroke': '#d62728', 'stroke-width': '1.5', 'stroke-dasharray': '8 3 2 3'},
    'V': {'stroke': '#1f77b4', 'stroke-width': '1.5', 'stroke-dasharray': '6 4'},
    'F': {'stroke': '#999999', 'stroke-width': '0.75'},
    'U': {'stroke': '#9467bd', 'stroke-width': '1', 'stroke-dasharray': '1 3'},
}

ET.register_namespace('', SVG_NS)


def _fmt(value: float) -> str:
    text = f"{value:.4f}".rstrip('0').rstrip('.')
    return '0' if text in ('-0', '') else text


class _Frame:
    """Maps sheet coordinates into the SVG canvas, y pointing up."""

    def __init__(self, points: Iterable[Sequence[float]]):
        pts = list(points) or [(0.0, 0.0), (1.0, 1.0)]
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        self.min_x, self.max_y = min(xs), max(ys)
        span = max(max(xs) - self.min_x, self.max_y - min(ys), 1e-9)
        self.scale = (SIZE - 2 * MARGIN) / span

    def __call__(self, point: Sequence[float], shift: float = 0.0) -> Tuple[str, str]:
        x = MARGIN + (point[0] - self.min_x) * self.scale + shift
        y = MARGIN + (self.max_y - point[1]) * self.scale - shift
        return _fmt(x), _fmt(y)


def _svg_root(title: str) -> ET.Element:
    root = ET.Element(f'{{{SVG_NS}}}svg', {
        'width': _fmt(SIZE),
        'height': _fmt(SIZE),
        'viewBox': f'0 0 {_fmt(SIZE)} {_fmt(SIZE)}',
    })
    ET.SubElement(root, f'{{{SVG_NS}}}title').text = title
    return root


def _line(parent: ET.Element, frame: _Frame, p, q, style: Dict[str, str],
          shift: float = 0.0, **attrs) -> ET.Element:
    x1, y1 = frame(p, shift)
    x2, y2 = frame(q, shift)
    element = ET.SubElement(parent, f'{{{SVG_NS}}}line',
                            {'x1': x1, 'y1': y1, 'x2': x2, 'y2': y2})
    for key, value in {**style, **attrs}.items():
        element.set(key, value)
    return element


def _polygon(parent: ET.Element, frame: _Frame, points, shift: float, **attrs) -> ET.Element:
    coords = ' '.join(','.join(frame(p, shift)) for p in points)
    element = ET.SubElement(parent, f'{{{SVG_NS}}}polygon', {'points': coords})
    for key, value in attrs.items():
        element.set(key, value)
    return element


def _to_text(root: ET.Element) -> str:
    ET.indent(root)
    return ET.tostring(root, encoding='unicode') + '\n'


def render_cp(cp: CreasePattern) -> str:
    """SVG of the crease pattern, one line per edge styled by assignment."""
    frame = _Frame(cp.vertices_coords)
    root = _svg_root('crease pattern')
    group = ET.SubElement(root, f'{{{SVG_NS}}}g', {'id': 'edges', 'stroke-linecap': 'round'})
    for e, ((p, q), code) in enumerate(cp.segments()):
        _line(group, frame, p, q, EDGE_STYLES.get(code, EDGE_STYLES['U']),
              **{'data-edge': str(e), 'data-assignment': code})
    return _to_text(root)


def render_state(state: FoldedState) -> str:
    """
    SVG of the folded state: faces drawn bottom to top with a per-layer
    offset, then crease images tagged with their source edge ids.
    """
    cp = state.cp
    polygons = {f: state.face_polygon(f) for f in range(cp.num_faces)}
    frame = _Frame(p for poly in polygons.values() for p in poly)
    root = _svg_root('folded state')
    layers = state.face_layers or tuple(0 for _ in range(cp.num_faces))
    top = max(layers, default=0)

    faces = ET.SubElement(root, f'{{{SVG_NS}}}g', {'id': 'faces', 'stroke': '#333333'})
    for f in sorted(polygons, key=lambda f: (layers[f], f)):
        shade = 0.35 + 0.5 * (layers[f] / top if top else 1.0)
        fill = '#f2d7a6' if state.parity(f) == 1 else '#c9b38a'
        _polygon(faces, frame, polygons[f], layers[f] * LAYER_OFFSET,
                 fill=fill, **{'fill-opacity': _fmt(shade), 'stroke-width': '1',
                               'data-face': str(f), 'data-layer': str(layers[f])})

    creases = ET.SubElement(root, f'{{{SVG_NS}}}g', {'id': 'creases'})
    for i, j, e in state.SP:
        code = cp.effective_assignments[e]
        if code == 'B' or not cp.edge_faces[e]:
            continue
        f = cp.edge_faces[e][0]
        iso = state.face_isometries[f]
        p, q = iso.apply(cp.vertices_coords[i]), iso.apply(cp.vertices_coords[j])
        _line(creases, frame, p, q, EDGE_STYLES[code], layers[f] * LAYER_OFFSET,
              **{'data-edge': str(e)})
    return _to_text(root)


def render_export(document: Dict) -> str:
    """SVG of a FoldedState export document: CF cells shaded by stack depth."""
    cells: List[Dict] = list(document.get('CF', []))
    points = [p for cell in cells for p in cell.get('polygon', [])]
    points += [p[:2] for p in document.get('P', [])]
    frame = _Frame(points)
    root = _svg_root('folded export')
    deepest = max((len(cell.get('faces', [])) for cell in cells), default=1) or 1

    group = ET.SubElement(root, f'{{{SVG_NS}}}g', {'id': 'cells', 'stroke': '#333333'})
    for index, cell in enumerate(cells):
        depth = len(cell.get('faces', []))
        _polygon(group, frame, cell.get('polygon', []), 0.0,
                 fill='#f2d7a6', **{'fill-opacity': _fmt(0.2 + 0.8 * depth / deepest),
                                    'data-cell': str(index),
                                    'data-faces': ' '.join(str(f) for f in cell.get('faces', []))})

    coords = document.get('P', [])
    creases = ET.SubElement(root, f'{{{SVG_NS}}}g', {'id': 'creases'})
    for i, j, e in document.get('SP', []):
        if i < len(coords) and j < len(coords):
            _line(creases, frame, coords[i][:2], coords[j][:2], EDGE_STYLES['F'],
                  **{'data-edge': str(e)})
    return _to_text(root)
