"""
CP model module - the crease pattern value, its document format, and
structural validation.

A CP document is JSON with the keys vertices_coords, edges_vertices,
edges_assignment and faces_vertices. Unknown top-level keys are carried
through untouched so a document survives a parse/serialize round trip.
"""

import json
import logging
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from shapely.geometry import LineString, MultiLineString, Polygon
from shapely.ops import polygonize, unary_union

from src.core.diagnostics import CompileError, Diagnostic, has_errors, make_diagnostic
from src.core.geometry import EPS, is_ccw

logger = logging.getLogger(__name__)

ASSIGNMENTS = ('B', 'M', 'V', 'F', 'U')
KEYS = ('vertices_coords', 'edges_vertices', 'edges_assignment', 'faces_vertices')

Point = Tuple[float, float]
Segment = Tuple[Point, Point]


@dataclass(frozen=True)
class CreasePattern:
    """Vertices, edges, assignments and counterclockwise faces of a flat sheet."""
    vertices_coords: Tuple[Point, ...] = ()
    edges_vertices: Tuple[Tuple[int, int], ...] = ()
    edges_assignment: Tuple[str, ...] = ()
    faces_vertices: Tuple[Tuple[int, ...], ...] = ()
    # unknown document keys, kept for round trip
    extras: Dict[str, Any] = field(default_factory=dict)
    # non-fatal parse notes (e.g. reoriented faces)
    notes: Tuple[Diagnostic, ...] = field(default=(), compare=False)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices_coords)

    @property
    def num_edges(self) -> int:
        return len(self.edges_vertices)

    @property
    def num_faces(self) -> int:
        return len(self.faces_vertices)

    @property
    def has_assignments(self) -> bool:
        return len(self.edges_assignment) > 0

    @cached_property
    def edge_index(self) -> Dict[Tuple[int, int], int]:
        """Undirected (min, max) vertex pair -> first edge id."""
        index: Dict[Tuple[int, int], int] = {}
        for e, (i, j) in enumerate(self.edges_vertices):
            index.setdefault((min(i, j), max(i, j)), e)
        return index

    @cached_property
    def vertex_edges(self) -> Tuple[Tuple[int, ...], ...]:
        incident: List[List[int]] = [[] for _ in self.vertices_coords]
        for e, (i, j) in enumerate(self.edges_vertices):
            incident[i].append(e)
            if j != i:
                incident[j].append(e)
        return tuple(tuple(es) for es in incident)

    @cached_property
    def edge_faces(self) -> Tuple[Tuple[int, ...], ...]:
        """Faces using each edge as a side, in face order."""
        used: List[List[int]] = [[] for _ in self.edges_vertices]
        for f, cycle in enumerate(self.faces_vertices):
            for a, b in face_sides(cycle):
                e = self.edge_index.get((min(a, b), max(a, b)))
                if e is not None:
                    used[e].append(f)
        return tuple(tuple(fs) for fs in used)

    def faces_at_vertex(self, v: int) -> Tuple[int, ...]:
        return tuple(f for f, cycle in enumerate(self.faces_vertices) if v in cycle)

    @cached_property
    def effective_assignments(self) -> Tuple[str, ...]:
        """
        Assignments as the folder sees them.

        Missing assignments read as B on the sheet boundary and U inside;
        a U edge on the boundary is treated as B.
        """
        result = []
        for e in range(self.num_edges):
            on_boundary = len(self.edge_faces[e]) <= 1
            if e < len(self.edges_assignment):
                code = self.edges_assignment[e]
            else:
                code = 'B' if on_boundary else 'U'
            if code == 'U' and on_boundary:
                code = 'B'
            result.append(code)
        return tuple(result)

    @cached_property
    def boundary_edges(self) -> FrozenSet[int]:
        return frozenset(e for e, a in enumerate(self.effective_assignments) if a == 'B')

    @cached_property
    def boundary_vertices(self) -> FrozenSet[int]:
        return frozenset(v for e in self.boundary_edges for v in self.edges_vertices[e])

    def interior_vertices(self) -> List[int]:
        return [v for v in range(self.num_vertices) if v not in self.boundary_vertices]

    def assignment_counts(self) -> Dict[str, int]:
        counts = {code: 0 for code in ASSIGNMENTS}
        for code in self.edges_assignment:
            counts[code] = counts.get(code, 0) + 1
        return counts

    def face_coords(self, f: int) -> List[Point]:
        return [self.vertices_coords[v] for v in self.faces_vertices[f]]

    def segments(self) -> List[Tuple[Segment, str]]:
        """Every edge as ((p, q), assignment)."""
        return [
            ((self.vertices_coords[i], self.vertices_coords[j]), a)
            for (i, j), a in zip(self.edges_vertices, self.effective_assignments)
        ]


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of validate_structure; valid iff no error-severity diagnostic."""
    valid: bool
    diagnostics: Tuple[Diagnostic, ...] = ()

    @property
    def errors(self) -> Tuple[Diagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.is_error)


def face_sides(cycle: Sequence[int]) -> List[Tuple[int, int]]:
    return [(cycle[k], cycle[(k + 1) % len(cycle)]) for k in range(len(cycle))]


# ---------------------------------------------------------------------------
# Parsing and serialization
# ---------------------------------------------------------------------------

def _line_of(text: str, key: str) -> int:
    pos = text.find(f'"{key}"')
    return text.count('\n', 0, pos) + 1 if pos >= 0 else 1


def _type_name(value: Any) -> str:
    if value is None:
        return 'null'
    if isinstance(value, bool):
        return 'boolean'
    if isinstance(value, (int, float)):
        return 'number'
    if isinstance(value, str):
        return 'string'
    if isinstance(value, list):
        return 'array'
    return 'object'


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _is_index(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def parse_cp(text: str) -> CreasePattern:
    """
    Parse a CP document.

    Args:
        text: JSON document with the four CP keys

    Returns:
        CreasePattern matching the document; clockwise faces are reoriented
        and noted

    Raises:
        CompileError: with every CSE diagnostic found
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        token = text[e.pos] if e.pos < len(text) else 'EOF'
        raise CompileError([make_diagnostic(
            'E_CP_SYNTAX_UNEXPECTED_TOKEN',
            token=token, line=e.lineno, column=e.colno, command='document',
            faulty_cp_code_line_numbers=[e.lineno],
        )]) from e

    if not isinstance(doc, dict):
        raise CompileError([make_diagnostic(
            'E_CP_SYNTAX_INVALID_PARAM_TYPE',
            param_name='document', command='document', expected_type='object',
            value=str(doc)[:40], actual_type=_type_name(doc),
            faulty_cp_code_line_numbers=[1],
        )])

    errors: List[Diagnostic] = []

    def type_error(command: str, param: str, expected: str, value: Any) -> None:
        key = command.split('[')[0]
        errors.append(make_diagnostic(
            'E_CP_SYNTAX_INVALID_PARAM_TYPE',
            command=command, param_name=param, expected_type=expected,
            value=json.dumps(value), actual_type=_type_name(value),
            faulty_token_or_command=json.dumps(value),
            faulty_cp_code_line_numbers=[_line_of(text, key)],
        ))

    def count_error(command: str, expected: Any, got: int) -> None:
        key = command.split('[')[0]
        errors.append(make_diagnostic(
            'E_CP_SYNTAX_INVALID_PARAM_COUNT',
            command=command, expected=expected, got=got,
            faulty_cp_code_line_numbers=[_line_of(text, key)],
        ))

    def field_list(key: str) -> list:
        value = doc.get(key, [])
        if not isinstance(value, list):
            type_error(key, key, 'array', value)
            return []
        return value

    coords: List[Point] = []
    for k, item in enumerate(field_list('vertices_coords')):
        command = f'vertices_coords[{k}]'
        if not isinstance(item, list):
            type_error(command, 'point', 'array', item)
            continue
        if len(item) != 2:
            count_error(command, 2, len(item))
            continue
        bad = [v for v in item if not _is_number(v)]
        if bad:
            type_error(command, 'coordinate', 'number', bad[0])
            continue
        coords.append((float(item[0]), float(item[1])))

    n = len(coords)
    edges: List[Tuple[int, int]] = []
    for k, item in enumerate(field_list('edges_vertices')):
        command = f'edges_vertices[{k}]'
        if not isinstance(item, list):
            type_error(command, 'edge', 'array', item)
            continue
        if len(item) != 2:
            count_error(command, 2, len(item))
            continue
        bad = [v for v in item if not _is_index(v)]
        if bad:
            type_error(command, 'vertex_index', 'integer', bad[0])
            continue
        out = [v for v in item if not 0 <= v < n]
        if out:
            errors.append(make_diagnostic(
                'E_CP_SYNTAX_INVALID_LINE_REFERENCE',
                command=command, line_id=k, point_id=out[0],
                faulty_cp_code_line_numbers=[_line_of(text, 'edges_vertices')],
            ))
            continue
        edges.append((item[0], item[1]))

    assignments: List[str] = []
    for k, item in enumerate(field_list('edges_assignment')):
        if not isinstance(item, str) or item not in ASSIGNMENTS:
            type_error(f'edges_assignment[{k}]', 'assignment', 'one of B, M, V, F, U', item)
            continue
        assignments.append(item)

    faces: List[Tuple[int, ...]] = []
    for k, item in enumerate(field_list('faces_vertices')):
        command = f'faces_vertices[{k}]'
        if not isinstance(item, list):
            type_error(command, 'face', 'array', item)
            continue
        bad = [v for v in item if not _is_index(v)]
        if bad:
            type_error(command, 'vertex_index', 'integer', bad[0])
            continue
        out = [v for v in item if not 0 <= v < n]
        if out:
            errors.append(make_diagnostic(
                'E_CP_SYNTAX_INVALID_LINE_REFERENCE',
                command=command, point_id=out[0], line_id='-',
                faulty_cp_code_line_numbers=[_line_of(text, 'faces_vertices')],
            ))
            continue
        faces.append(tuple(item))

    if errors:
        raise CompileError(errors)

    notes: List[Diagnostic] = []
    oriented: List[Tuple[int, ...]] = []
    finite = all(math.isfinite(c) for p in coords for c in p)
    for k, cycle in enumerate(faces):
        if finite and len(set(cycle)) >= 3 and not is_ccw([coords[v] for v in cycle]):
            cycle = tuple(reversed(cycle))
            notes.append(make_diagnostic(
                'E_CP_SYNTAX_INVALID_PARAM_TYPE', severity='note',
                command=f'faces_vertices[{k}]', param_name='orientation',
                expected_type='counterclockwise', actual_type='clockwise',
                value=list(cycle), face=k,
            ))
        oriented.append(cycle)
    if notes:
        logger.debug('Reoriented %d clockwise face cycle(s)', len(notes))

    extras = {key: value for key, value in doc.items() if key not in KEYS}
    return CreasePattern(
        vertices_coords=tuple(coords),
        edges_vertices=tuple(edges),
        edges_assignment=tuple(assignments),
        faces_vertices=tuple(oriented),
        extras=extras,
        notes=tuple(notes),
    )


def read_cp(path: str) -> CreasePattern:
    """Parse a CP document from a UTF-8 file (OSError propagates)."""
    with open(path, 'r', encoding='utf-8') as handle:
        return parse_cp(handle.read())


def serialize_cp(cp: CreasePattern) -> str:
    """
    Canonical CP document: fixed key order, shortest round-trip floats,
    extras after the CP keys in sorted order, newline-terminated.
    """
    body = {
        'vertices_coords': [[float(x), float(y)] for x, y in cp.vertices_coords],
        'edges_vertices': [[int(i), int(j)] for i, j in cp.edges_vertices],
        'edges_assignment': list(cp.edges_assignment),
        'faces_vertices': [[int(v) for v in cycle] for cycle in cp.faces_vertices],
    }
    for key in sorted(cp.extras):
        body[key] = cp.extras[key]
    lines = [
        f'  {json.dumps(key)}: {json.dumps(value, ensure_ascii=False)}'
        for key, value in body.items()
    ]
    return '{\n' + ',\n'.join(lines) + '\n}\n'


# ---------------------------------------------------------------------------
# Structural validation
# ---------------------------------------------------------------------------

def _check_diag(check: str, command: str, expected: Any, got: Any,
                severity: str = 'error', **params) -> Diagnostic:
    return make_diagnostic(
        'E_CP_SYNTAX_INVALID_PARAM_COUNT', severity=severity,
        check=check, command=command, expected=expected, got=got, **params
    )


def validate_structure(cp: CreasePattern) -> ValidationReport:
    """
    Run every structural check and report all failures.

    Order: presence, coordinates, edges, assignments, faces, duplicate edges,
    Euler characteristic (V - E + F + 1 = 2), face coverage.
    """
    diags: List[Diagnostic] = []
    n = cp.num_vertices

    # presence
    if n == 0:
        diags.append(_check_diag('presence', 'vertices_coords', '>= 3', 0))
    if cp.num_edges == 0:
        diags.append(_check_diag('presence', 'edges_vertices', '>= 3', 0))
    if cp.num_faces == 0:
        diags.append(_check_diag('presence', 'faces_vertices', '>= 1', 0))
    if cp.num_edges and not cp.has_assignments:
        diags.append(_check_diag('presence', 'edges_assignment', cp.num_edges, 0,
                                 severity='warning'))

    # coordinates
    coords_ok = True
    for k, point in enumerate(cp.vertices_coords):
        if len(point) != 2:
            diags.append(_check_diag('coordinate_arity', f'vertices_coords[{k}]', 2, len(point)))
            coords_ok = False
        elif not all(isinstance(c, (int, float)) and math.isfinite(c) for c in point):
            diags.append(make_diagnostic(
                'E_CP_SYNTAX_INVALID_PARAM_TYPE',
                command=f'vertices_coords[{k}]', param_name='coordinate',
                expected_type='finite number', value=[str(c) for c in point],
                actual_type='non-finite',
            ))
            coords_ok = False

    # edges
    edges_ok = True
    for k, edge in enumerate(cp.edges_vertices):
        if len(edge) != 2:
            diags.append(_check_diag('edge_arity', f'edges_vertices[{k}]', 2, len(edge)))
            edges_ok = False
            continue
        out = [v for v in edge if not (isinstance(v, int) and 0 <= v < n)]
        if out:
            diags.append(make_diagnostic(
                'E_CP_SYNTAX_INVALID_LINE_REFERENCE',
                command=f'edges_vertices[{k}]', line_id=k, point_id=out[0],
            ))
            edges_ok = False
        elif edge[0] == edge[1]:
            diags.append(make_diagnostic(
                'E_CP_SYNTAX_INVALID_LINE_REFERENCE',
                command=f'edges_vertices[{k}]', line_id=k, point_id=edge[0],
                check='distinct_endpoints',
            ))
            edges_ok = False

    # assignments
    for k, code in enumerate(cp.edges_assignment):
        if code not in ASSIGNMENTS:
            diags.append(make_diagnostic(
                'E_CP_SYNTAX_INVALID_PARAM_TYPE',
                command=f'edges_assignment[{k}]', param_name='assignment',
                expected_type='one of B, M, V, F, U', value=str(code),
                actual_type=type(code).__name__,
            ))
    if cp.has_assignments and len(cp.edges_assignment) != cp.num_edges:
        diags.append(_check_diag('assignment_count', 'edges_assignment',
                                 cp.num_edges, len(cp.edges_assignment)))
        edges_ok = False

    # faces
    faces_ok = True
    for k, cycle in enumerate(cp.faces_vertices):
        if len(cycle) < 3:
            diags.append(_check_diag('face_arity', f'faces_vertices[{k}]', '>= 3', len(cycle)))
            faces_ok = False
        out = [v for v in cycle if not (isinstance(v, int) and 0 <= v < n)]
        if out:
            diags.append(make_diagnostic(
                'E_CP_SYNTAX_INVALID_LINE_REFERENCE',
                command=f'faces_vertices[{k}]', line_id='-', point_id=out[0], face=k,
            ))
            faces_ok = False

    # duplicate undirected edges
    seen: Dict[Tuple[int, int], int] = {}
    for k, edge in enumerate(cp.edges_vertices):
        if len(edge) != 2:
            continue
        key = (min(edge), max(edge))
        if key in seen:
            diags.append(_check_diag('duplicate_edge', f'edges_vertices[{k}]',
                                     'unique', f'duplicate of edge {seen[key]}', edge=k))
            edges_ok = False
        else:
            seen[key] = k

    # Euler characteristic with the outer face counted
    chi = n - cp.num_edges + cp.num_faces + 1
    if chi != 2:
        diags.append(_check_diag('euler', 'document', 2, chi))

    if coords_ok and edges_ok and faces_ok and cp.num_faces:
        diags.extend(_coverage_diagnostics(cp))

    report = ValidationReport(valid=not has_errors(diags), diagnostics=tuple(diags))
    if not report.valid:
        logger.debug('Structural validation failed with %d error(s)', len(report.errors))
    return report


def _coverage_diagnostics(cp: CreasePattern) -> List[Diagnostic]:
    """Face cycles must tile the sheet: sides are edges, usage counts match."""
    diags: List[Diagnostic] = []
    for f, cycle in enumerate(cp.faces_vertices):
        for a, b in face_sides(cycle):
            if (min(a, b), max(a, b)) not in cp.edge_index:
                diags.append(_check_diag('coverage', f'faces_vertices[{f}]',
                                         'side on an edge', f'[{a}, {b}]', face=f))

    codes = cp.edges_assignment if cp.has_assignments else ()
    for e, faces in enumerate(cp.edge_faces):
        code = codes[e] if codes else None
        used = len(faces)
        if code == 'B':
            ok = used == 1
            expected = 1
        elif code in (None, 'U'):
            ok = used in (1, 2)
            expected = '1 or 2'
        else:
            ok = used == 2
            expected = 2
        if not ok:
            diags.append(_check_diag('coverage', f'edges_vertices[{e}]', expected, used,
                                     edge=e, faulty_crease_ids=[e]))

    polygons = []
    for f in range(cp.num_faces):
        poly = Polygon(cp.face_coords(f))
        if not poly.is_valid or poly.area < EPS:
            diags.append(_check_diag('coverage', f'faces_vertices[{f}]',
                                     'simple polygon', 'degenerate', face=f))
        else:
            polygons.append(poly)
    if polygons:
        total = sum(p.area for p in polygons)
        union = unary_union(polygons).area
        if abs(total - union) > 1e-7:
            diags.append(_check_diag('overlap', 'faces_vertices', round(union, 9),
                                     round(total, 9)))
    return diags


# ---------------------------------------------------------------------------
# Canonical form and planar construction
# ---------------------------------------------------------------------------

def _snap(value: float) -> float:
    return round(value, 9) + 0.0


def canonicalize_cp(cp: CreasePattern) -> CreasePattern:
    """
    Re-index so geometrically identical CPs compare equal.

    Vertices sort by snapped (x, y); edges by sorted endpoint pair; faces are
    counterclockwise, start at their smallest index, and sort lexicographically.
    """
    order = sorted(range(cp.num_vertices),
                   key=lambda v: (_snap(cp.vertices_coords[v][0]),
                                  _snap(cp.vertices_coords[v][1]), v))
    remap = {old: new for new, old in enumerate(order)}
    coords = tuple(cp.vertices_coords[v] for v in order)

    edge_rows = []
    for e, (i, j) in enumerate(cp.edges_vertices):
        a, b = sorted((remap[i], remap[j]))
        code = cp.edges_assignment[e] if cp.has_assignments else None
        edge_rows.append(((a, b), code))
    edge_rows.sort(key=lambda row: row[0])

    faces = []
    for cycle in cp.faces_vertices:
        mapped = [remap[v] for v in cycle]
        if not is_ccw([coords[v] for v in mapped]):
            mapped.reverse()
        start = mapped.index(min(mapped))
        faces.append(tuple(mapped[start:] + mapped[:start]))
    faces.sort()

    return CreasePattern(
        vertices_coords=coords,
        edges_vertices=tuple(edge for edge, _ in edge_rows),
        edges_assignment=tuple(code for _, code in edge_rows) if cp.has_assignments else (),
        faces_vertices=tuple(faces),
        extras=dict(cp.extras),
        notes=cp.notes,
    )


def build_cp(segments: Iterable[Tuple[Segment, str]]) -> CreasePattern:
    """
    Planar subdivision of assigned segments into a canonical CP.

    Segments are noded at every intersection; a piece takes the assignment
    of the segments covering it (B wins, otherwise the last one listed).
    Bounded faces come from polygonizing the noded linework.
    """
    sources = [(LineString(seg), code) for seg, code in segments
               if math.dist(seg[0], seg[1]) > EPS]
    if not sources:
        return CreasePattern()
    noded = unary_union(MultiLineString([line for line, _ in sources]))
    pieces = list(noded.geoms) if hasattr(noded, 'geoms') else [noded]

    index: Dict[Tuple[float, float], int] = {}
    coords: List[Point] = []

    def vertex(point) -> int:
        key = (_snap(point[0]), _snap(point[1]))
        if key not in index:
            index[key] = len(coords)
            coords.append((float(point[0]), float(point[1])))
        return index[key]

    edges: Dict[Tuple[int, int], str] = {}
    for piece in pieces:
        points = list(piece.coords)
        for p, q in zip(points, points[1:]):
            a, b = vertex(p), vertex(q)
            if a == b:
                continue
            mid = LineString([p, q]).interpolate(0.5, normalized=True)
            covering = [code for line, code in sources if line.distance(mid) < 1e-7]
            code = 'B' if 'B' in covering else (covering[-1] if covering else 'U')
            edges[(min(a, b), max(a, b))] = code

    faces = []
    for poly in polygonize(pieces):
        ring = list(poly.exterior.coords)[:-1]
        cycle = [vertex(p) for p in ring]
        if not is_ccw([coords[v] for v in cycle]):
            cycle.reverse()
        faces.append(tuple(cycle))

    keys = sorted(edges)
    cp = CreasePattern(
        vertices_coords=tuple(coords),
        edges_vertices=tuple(keys),
        edges_assignment=tuple(edges[k] for k in keys),
        faces_vertices=tuple(faces),
    )
    return canonicalize_cp(cp)


def with_assignment(cp: CreasePattern, edge: int, code: str) -> CreasePattern:
    """Copy of cp with one edge reassigned."""
    codes = list(cp.edges_assignment)
    codes[edge] = code
    return replace(cp, edges_assignment=tuple(codes))


def boundary_polygon(cp: CreasePattern) -> Optional[Polygon]:
    """The sheet outline traced by boundary edges, collinear vertices dropped."""
    lines = [LineString(seg) for seg, code in cp.segments() if code == 'B']
    if not lines:
        return None
    merged = unary_union(lines)
    polygons = list(polygonize(list(getattr(merged, 'geoms', [merged]))))
    if not polygons:
        return None
    outline = unary_union(polygons)
    if outline.geom_type != 'Polygon':
        return outline
    ring = list(outline.exterior.coords)[:-1]
    corners = []
    for k, (x, y) in enumerate(ring):
        px, py = ring[k - 1]
        nx, ny = ring[(k + 1) % len(ring)]
        if abs((x - px) * (ny - y) - (y - py) * (nx - x)) > EPS:
            corners.append((x, y))
    return Polygon(corners)
