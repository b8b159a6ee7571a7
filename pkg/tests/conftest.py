"""Shared crease-pattern builders for the test suite."""

import json
from typing import Dict, List, Sequence, Tuple

import pytest

from src.core.cp_model import CreasePattern, build_cp, serialize_cp

Point = Tuple[float, float]


def sheet_segments(width: float = 1.0, height: float = 1.0) -> List[Tuple[Tuple[Point, Point], str]]:
    corners = [(0.0, 0.0), (width, 0.0), (width, height), (0.0, height)]
    return [((corners[k], corners[(k + 1) % 4]), 'B') for k in range(4)]


def sheet_cp(creases: Sequence[Tuple[Point, Point, str]] = (),
             width: float = 1.0, height: float = 1.0) -> CreasePattern:
    """Rectangle [0, width] x [0, height] with the given (p, q, assignment) creases."""
    segments = sheet_segments(width, height)
    segments += [((p, q), code) for p, q, code in creases]
    return build_cp(segments)


def strip_cp(positions: Sequence[float], labels: Sequence[str],
             width: float = 1.0, height: float = 0.25) -> CreasePattern:
    """Horizontal strip with vertical creases at the given x positions."""
    return sheet_cp([((x, 0.0), (x, height), code) for x, code in zip(positions, labels)],
                    width, height)


def plus_cp(east: str, north: str, west: str, south: str) -> CreasePattern:
    """Unit square with four creases from the centre to the edge midpoints."""
    c = (0.5, 0.5)
    return sheet_cp([
        (c, (1.0, 0.5), east),
        (c, (0.5, 1.0), north),
        (c, (0.0, 0.5), west),
        (c, (0.5, 0.0), south),
    ])


def diagonal_x_cp(ne: str, nw: str, sw: str, se: str) -> CreasePattern:
    c = (0.5, 0.5)
    return sheet_cp([
        (c, (1.0, 1.0), ne),
        (c, (0.0, 1.0), nw),
        (c, (0.0, 0.0), sw),
        (c, (1.0, 0.0), se),
    ])


def half_fold(code: str = 'V') -> CreasePattern:
    return sheet_cp([((0.5, 0.0), (0.5, 1.0), code)])


def edge_between(cp: CreasePattern, p: Point, q: Point) -> int:
    """Id of the edge joining the vertices at p and q."""
    def find(point):
        for v, xy in enumerate(cp.vertices_coords):
            if abs(xy[0] - point[0]) < 1e-9 and abs(xy[1] - point[1]) < 1e-9:
                return v
        raise KeyError(point)
    a, b = find(p), find(q)
    return cp.edge_index[(min(a, b), max(a, b))]


def golden_corpus() -> Dict[str, CreasePattern]:
    """Foldable fixtures with a unique flat-folded state."""
    third = 1.0 / 3.0
    return {
        'bare_square': sheet_cp(),
        'bare_rectangle': sheet_cp(width=2.0, height=1.0),
        'half_vertical_v': half_fold('V'),
        'half_vertical_m': half_fold('M'),
        'half_horizontal_v': sheet_cp([((0.0, 0.5), (1.0, 0.5), 'V')]),
        'diagonal_v': sheet_cp([((0.0, 0.0), (1.0, 1.0), 'V')]),
        'antidiagonal_m': sheet_cp([((1.0, 0.0), (0.0, 1.0), 'M')]),
        'offset_v': sheet_cp([((0.3, 0.0), (0.3, 1.0), 'V')]),
        'slanted_v': sheet_cp([((0.0, 0.2), (1.0, 0.6), 'V')]),
        'corner_clip_m': sheet_cp([((0.7, 0.0), (1.0, 0.3), 'M')]),
        'flat_crease': sheet_cp([((0.5, 0.0), (0.5, 1.0), 'F')]),
        'accordion_vm': strip_cp([third, 2 * third], 'VM', height=1.0),
        'accordion_mv': strip_cp([third, 2 * third], 'MV', height=1.0),
        'four_panel_vmv': strip_cp([0.25, 0.5, 0.75], 'VMV'),
        'four_panel_mvm': strip_cp([0.25, 0.5, 0.75], 'MVM'),
        'plus_mmmv': plus_cp('M', 'M', 'M', 'V'),
        'plus_vmmm': plus_cp('V', 'M', 'M', 'M'),
        'plus_vvvm': plus_cp('V', 'V', 'V', 'M'),
        'plus_mvvv': plus_cp('M', 'V', 'V', 'V'),
        'diagonal_x_mmmv': diagonal_x_cp('M', 'M', 'M', 'V'),
        'rectangle_half_v': sheet_cp([((1.0, 0.0), (1.0, 1.0), 'V')], width=2.0),
    }


GOLDEN = golden_corpus()


def ambiguous_corpus() -> Dict[str, CreasePattern]:
    """Patterns that fold flat in more than one layer order."""
    third = 1.0 / 3.0
    return {
        'letter_vv': strip_cp([third, 2 * third], 'VV', height=1.0),
        'letter_mm': strip_cp([third, 2 * third], 'MM', height=1.0),
        'spiral_vvvv': strip_cp([0.2, 0.4, 0.6, 0.8], 'VVVV'),
    }


def self_intersecting_corpus() -> Dict[str, CreasePattern]:
    """Patterns whose every layer order makes the paper pass through itself."""
    return {
        'tight_vv': strip_cp([0.4, 0.6], 'VV'),
        'tight_mm': strip_cp([0.4, 0.6], 'MM'),
        'offset_tight_vv': strip_cp([0.3, 0.45], 'VV'),
    }


AMBIGUOUS = ambiguous_corpus()
SELF_INTERSECTING = self_intersecting_corpus()


@pytest.fixture
def square():
    return sheet_cp()


@pytest.fixture
def half():
    return half_fold('V')


@pytest.fixture
def letter_fold():
    """Three equal panels, both creases valley: the far panels' order is free."""
    third = 1.0 / 3.0
    return strip_cp([third, 2 * third], 'VV', height=1.0)


@pytest.fixture
def tight_strip():
    """Creases at 0.4 and 0.6, both valley: no consistent layer order."""
    return strip_cp([0.4, 0.6], 'VV')


@pytest.fixture
def maekawa_broken():
    return plus_cp('M', 'M', 'M', 'M')


@pytest.fixture
def kawasaki_broken():
    """Two straight creases crossing at 100/80 degrees."""
    return sheet_cp([
        ((0.0, 0.5), (1.0, 0.5), 'M'),
        ((0.5882, 0.0), (0.5, 0.5), 'M'),
        ((0.5, 0.5), (0.4118, 1.0), 'V'),
    ])


@pytest.fixture
def write_cp(tmp_path):
    """Write a CreasePattern (or raw text) to a file and return its path."""
    def write(name: str, content) -> str:
        path = tmp_path / name
        text = content if isinstance(content, str) else serialize_cp(content)
        path.write_text(text, encoding='utf-8')
        return str(path)
    return write


SQUARE_DOC = json.dumps({
    'vertices_coords': [[0, 0], [1, 0], [1, 1], [0, 1]],
    'edges_vertices': [[0, 1], [1, 2], [2, 3], [3, 0]],
    'edges_assignment': ['B', 'B', 'B', 'B'],
    'faces_vertices': [[0, 1, 2, 3]],
}, indent=2)
