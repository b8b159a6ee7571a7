"""
Folder module - compiles a crease pattern into its flat-folded state.

Pipeline: structural validation -> unassigned-crease check -> local laws ->
face isometries -> overlap cells -> layer constraints -> backtracking layer
search -> stacks. Failures surface as CompileError with GIF/PSI/AFS
diagnostics.

Viewer convention: the sheet is seen from +z. Across a valley crease the
moving face lands above the face it folds onto when that face shows its
front side; mountain creases put it below.
"""

import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx
import shapely
from shapely.geometry import LineString, Polygon
from shapely.ops import polygonize, unary_union

from src.core.config import FoldConfig
from src.core.cp_model import CreasePattern, validate_structure
from src.core.diagnostics import DISAMBIGUATION_HINT, CompileError, Diagnostic, make_diagnostic
from src.core.foldability import check_flat_foldable_all
from src.core.geometry import (
    EPS,
    PlanarIsometry,
    crosses_interior,
    quantize,
    reflect_across,
    segment_overlap,
)

logger = logging.getLogger(__name__)

FOLDED = ('M', 'V')
CONSTRAINT_KINDS = ('TacoTaco', 'TacoTortilla', 'Transitivity')
SOLUTION_CAP = 2
# Unassigned creases tried by automatic completion
COMPLETION_CAP = 12
GRID = 1e-9

Point = Tuple[float, float]
Pair = Tuple[int, int]


def _pair(a: int, b: int) -> Pair:
    return (a, b) if a < b else (b, a)


def _above(values: Dict[Pair, bool], x: int, y: int) -> bool:
    """True when face x lies above face y; values[(a, b)] means a above b, a < b."""
    return values[(x, y)] if x < y else not values[(y, x)]


@dataclass(frozen=True)
class OverlapCell:
    """A region of the folded plane covered by a fixed set of faces."""
    polygon: Tuple[Point, ...]
    faces: Tuple[int, ...]
    point: Point
    # top to bottom once layers are solved
    stack: Tuple[int, ...] = ()


@dataclass(frozen=True)
class OverlapConstraint:
    """A taco-taco, taco-tortilla or transitivity constraint with its footprint."""
    kind: str
    faces: Tuple[int, ...]
    edges: Tuple[int, ...]
    # quantized centroid x, y and extent w, h of the constrained region
    footprint: Tuple[float, float, float, float]
    # quantized source-sheet centroids of the faces, sorted
    anchors: Tuple[Point, ...] = ()

    def key(self, mode: str = 'geometry') -> tuple:
        if mode == 'index':
            return (self.kind, self.faces, self.edges)
        return (self.kind, self.anchors, self.footprint)


@dataclass(frozen=True)
class Clause:
    """One layer-order requirement over pairwise above/below variables."""
    kind: str
    # semantic order: crease (top, bottom); TacoTortilla (a, b, c);
    # TacoTaco (a, b, c, d); Transitivity (x, y, z)
    faces: Tuple[int, ...]
    edges: Tuple[int, ...]
    variables: Tuple[Pair, ...]

    def satisfied(self, values: Dict[Pair, bool]) -> bool:
        f = self.faces
        if self.kind == 'crease':
            return _above(values, f[0], f[1])
        if self.kind == 'TacoTortilla':
            a, b, c = f
            return _above(values, a, c) == _above(values, b, c)
        if self.kind == 'TacoTaco':
            a, b, c, d = f
            c_between = _above(values, a, c) != _above(values, b, c)
            d_between = _above(values, a, d) != _above(values, b, d)
            return c_between == d_between
        x, y, z = f
        r1, r2, r3 = _above(values, x, y), _above(values, y, z), _above(values, z, x)
        return not (r1 == r2 == r3)


@dataclass
class LayerProblem:
    """Variables, clauses and cells handed to the layer search."""
    cells: List[OverlapCell]
    variables: List[Pair]
    clauses: List[Clause]
    constraints: List[OverlapConstraint] = field(default_factory=list)


@dataclass
class LayerSearch:
    solutions: List[Dict[Pair, bool]]
    conflict: Optional[Clause] = None


@dataclass(frozen=True)
class FoldedState:
    """The compiled flat pattern."""
    cp: CreasePattern
    P: Tuple[Point, ...]
    # (vertex i, vertex j, source edge id)
    SP: Tuple[Tuple[int, int, int], ...]
    face_isometries: Tuple[PlanarIsometry, ...]
    # (a, b) means face a above face b
    layer_order: FrozenSet[Pair] = frozenset()
    cells: Tuple[OverlapCell, ...] = ()
    constraints: Tuple[OverlapConstraint, ...] = ()
    face_layers: Tuple[int, ...] = ()
    simplified: bool = False

    @property
    def CF(self) -> Tuple[OverlapCell, ...]:
        return self.cells

    def parity(self, face: int) -> int:
        return self.face_isometries[face].parity

    def face_polygon(self, face: int) -> List[Point]:
        iso = self.face_isometries[face]
        return [iso.apply(p) for p in self.cp.face_coords(face)]

    def vertex_layer(self, v: int) -> int:
        faces = self.cp.faces_at_vertex(v)
        if not faces or not self.face_layers:
            return 0
        return self.face_layers[faces[0]]


# ---------------------------------------------------------------------------
# Face transforms
# ---------------------------------------------------------------------------

def _crease_step(cp: CreasePattern, e: int) -> PlanarIsometry:
    if cp.effective_assignments[e] not in FOLDED:
        return PlanarIsometry.identity()
    i, j = cp.edges_vertices[e]
    p, q = cp.vertices_coords[i], cp.vertices_coords[j]
    return reflect_across(p, (q[0] - p[0], q[1] - p[1]))


def face_dual_graph(cp: CreasePattern) -> nx.Graph:
    """
    Faces joined across every non-boundary edge they share.

    Each graph edge keeps the lowest crease id between its two faces under
    'crease' and all of them under 'creases'. Nodes and edges go in by id so
    traversal order is stable.
    """
    graph = nx.Graph()
    graph.add_nodes_from(range(cp.num_faces))
    assignments = cp.effective_assignments
    for e, faces in enumerate(cp.edge_faces):
        if len(faces) != 2 or assignments[e] == 'B':
            continue
        f, g = faces
        if graph.has_edge(f, g):
            graph[f][g]['creases'].append(e)
        else:
            graph.add_edge(f, g, crease=e, creases=[e])
    return graph


def compute_face_transforms(cp: CreasePattern) -> Tuple[PlanarIsometry, ...]:
    """
    Isometry placing every face in the folded plane.

    Face 0 stays put; neighbours across M/V creases pick up a reflection,
    neighbours across F/U edges share the transform. Transforms follow a
    breadth-first tree of the face dual graph and every other dual edge
    must close within tolerance.

    Raises:
        CompileError: CSE on a disconnected dual graph, GIF
            E_GEOM_LENGTH_CONSTRAINT_VIOLATION on a closure failure
    """
    count = cp.num_faces
    if count == 0:
        return ()
    graph = face_dual_graph(cp)
    if not nx.is_connected(graph):
        missing = sorted(set(graph) - nx.node_connected_component(graph, 0))
        raise CompileError([make_diagnostic(
            'E_CP_SYNTAX_INVALID_PARAM_COUNT',
            check='connectivity', command='faces_vertices',
            expected='connected faces', got=f'{len(missing)} unreachable face(s)',
            face=missing[0],
        )])

    transforms: List[Optional[PlanarIsometry]] = [None] * count
    transforms[0] = PlanarIsometry.identity()
    tree = set()
    for f, g in nx.bfs_edges(graph, 0):
        e = graph[f][g]['crease']
        transforms[g] = transforms[f].compose(_crease_step(cp, e))
        tree.add(e)

    failed: List[Diagnostic] = []
    for f, g, creases in sorted(graph.edges(data='creases'), key=lambda x: x[2][0]):
        for e in creases:
            if e in tree:
                continue
            expected = transforms[f].compose(_crease_step(cp, e))
            if transforms[g].is_close(expected):
                continue
            centre = Polygon(cp.face_coords(g)).centroid
            actual = transforms[g].apply((centre.x, centre.y))
            required = expected.apply((centre.x, centre.y))
            gap = ((actual[0] - required[0]) ** 2 + (actual[1] - required[1]) ** 2) ** 0.5
            failed.append(make_diagnostic(
                'E_GEOM_LENGTH_CONSTRAINT_VIOLATION',
                faulty_crease_ids=[e],
                point_a=[round(c, 9) for c in actual],
                point_b=[round(c, 9) for c in required],
                d1=round(gap, 9), d2=0.0,
            ))
    if failed:
        raise CompileError(sorted(failed, key=lambda d: d.params['faulty_crease_ids']))
    return tuple(transforms)


# ---------------------------------------------------------------------------
# Overlap cells and constraints
# ---------------------------------------------------------------------------

def folded_polygons(cp: CreasePattern, transforms: Sequence[PlanarIsometry]) -> List[Polygon]:
    """Folded face images snapped to the arrangement grid."""
    polygons = []
    for f, iso in enumerate(transforms):
        image = Polygon(iso.apply_many(cp.face_coords(f)))
        polygons.append(shapely.set_precision(image, GRID))
    return polygons


def compute_cells(polygons: Sequence[Polygon]) -> List[OverlapCell]:
    """Faces of the arrangement of folded face outlines, with their covers."""
    outlines = unary_union([p.exterior for p in polygons if not p.is_empty])
    lines = list(getattr(outlines, 'geoms', [outlines]))
    cells = []
    for piece in polygonize(lines):
        if piece.area < 1e-12:
            continue
        rep = piece.representative_point()
        faces = tuple(f for f, poly in enumerate(polygons) if poly.contains(rep))
        if not faces:
            continue
        ring = tuple((float(x), float(y)) for x, y in list(piece.exterior.coords)[:-1])
        cells.append(OverlapCell(polygon=ring, faces=faces, point=(rep.x, rep.y)))
    cells.sort(key=lambda c: (c.faces, quantize(c.point[0]), quantize(c.point[1])))
    return cells


def _footprint(geom) -> Tuple[float, float, float, float]:
    if geom is None or geom.is_empty:
        return (0.0, 0.0, 0.0, 0.0)
    c = geom.centroid
    minx, miny, maxx, maxy = geom.bounds
    return (quantize(c.x), quantize(c.y), quantize(maxx - minx), quantize(maxy - miny))


def _anchors(cp: CreasePattern, faces: Sequence[int]) -> Tuple[Point, ...]:
    points = []
    for f in faces:
        c = Polygon(cp.face_coords(f)).centroid
        points.append((quantize(c.x), quantize(c.y)))
    return tuple(sorted(points))


def build_layer_problem(
    cp: CreasePattern,
    transforms: Sequence[PlanarIsometry],
    config: Optional[FoldConfig] = None
) -> LayerProblem:
    """
    Collect cells, pairwise variables and clauses for the layer search.

    Raises:
        CompileError: GIF E_GEOM_TOO_MANY_LAYERS when a cell exceeds the cap
    """
    config = config or FoldConfig()
    polygons = folded_polygons(cp, transforms)
    cells = compute_cells(polygons)

    crowded = [c for c in cells if len(c.faces) > config.layer_cap]
    if crowded:
        raise CompileError([
            make_diagnostic(
                'E_GEOM_TOO_MANY_LAYERS',
                problematic_coordinates_or_regions=[round(c.point[0], 6), round(c.point[1], 6)],
                calculated_layers_at_point=len(c.faces),
                max_allowable_layers=config.layer_cap,
            )
            for c in crowded
        ])

    pair_set = {pair for c in cells for pair in itertools.combinations(c.faces, 2)}
    variables = sorted(pair_set)
    assignments = cp.effective_assignments
    creases = [
        e for e in range(cp.num_edges)
        if assignments[e] in FOLDED and len(cp.edge_faces[e]) == 2
    ]
    images = {
        e: tuple(transforms[cp.edge_faces[e][0]].apply(cp.vertices_coords[v])
                 for v in cp.edges_vertices[e])
        for e in creases
    }

    clauses: List[Clause] = []
    constraints: List[OverlapConstraint] = []

    for e in creases:
        f, g = cp.edge_faces[e]
        if _pair(f, g) not in pair_set:
            continue
        g_above = (assignments[e] == 'V') == (transforms[f].parity == 1)
        top, bottom = (g, f) if g_above else (f, g)
        clauses.append(Clause('crease', (top, bottom), (e,), (_pair(f, g),)))

    for e in creases:
        a, b = cp.edge_faces[e]
        for c in range(cp.num_faces):
            if c in (a, b) or _pair(a, c) not in pair_set or _pair(b, c) not in pair_set:
                continue
            if crosses_interior(images[e], polygons[c]):
                faces = (a, b, c)
                clauses.append(Clause('TacoTortilla', faces, (e,), (_pair(a, c), _pair(b, c))))
                region = LineString(images[e]).intersection(polygons[c])
                constraints.append(OverlapConstraint(
                    'TacoTortilla', tuple(sorted(faces)), (e,),
                    _footprint(region), _anchors(cp, faces),
                ))

    for e1, e2 in itertools.combinations(creases, 2):
        a, b = cp.edge_faces[e1]
        c, d = cp.edge_faces[e2]
        if len({a, b, c, d}) < 4:
            continue
        if any(_pair(x, y) not in pair_set for x in (a, b) for y in (c, d)):
            continue
        shared = segment_overlap(images[e1], images[e2])
        if shared is None:
            continue
        faces = (a, b, c, d)
        clauses.append(Clause(
            'TacoTaco', faces, (e1, e2),
            (_pair(a, c), _pair(b, c), _pair(a, d), _pair(b, d)),
        ))
        constraints.append(OverlapConstraint(
            'TacoTaco', tuple(sorted(faces)), (e1, e2),
            _footprint(LineString(shared)), _anchors(cp, faces),
        ))

    triples = sorted({t for c in cells for t in itertools.combinations(c.faces, 3)})
    for x, y, z in triples:
        clauses.append(Clause('Transitivity', (x, y, z), (),
                              (_pair(x, y), _pair(y, z), _pair(x, z))))
        region = polygons[x].intersection(polygons[y]).intersection(polygons[z])
        constraints.append(OverlapConstraint(
            'Transitivity', (x, y, z), (), _footprint(region), _anchors(cp, (x, y, z)),
        ))

    constraints.sort(key=lambda k: (k.kind, k.faces, k.edges))
    logger.debug('Layer problem: %d cells, %d variables, %d clauses',
                 len(cells), len(variables), len(clauses))
    return LayerProblem(cells=cells, variables=variables, clauses=clauses,
                        constraints=constraints)


# ---------------------------------------------------------------------------
# Layer search
# ---------------------------------------------------------------------------

def solve_layers(problem: LayerProblem, cap: int = SOLUTION_CAP) -> LayerSearch:
    """
    Propagate then backtrack over above/below variables, stopping at cap
    solutions. The first clause that failed is kept for reporting.
    """
    by_var: Dict[Pair, List[Clause]] = defaultdict(list)
    for clause in problem.clauses:
        for var in clause.variables:
            by_var[var].append(clause)

    result = LayerSearch(solutions=[])

    def fail(clause: Clause) -> bool:
        if result.conflict is None:
            result.conflict = clause
        return False

    def propagate(values: Dict[Pair, bool], queue: List[Pair]) -> bool:
        while queue:
            var = queue.pop()
            for clause in by_var[var]:
                open_vars = [v for v in clause.variables if v not in values]
                if not open_vars:
                    if not clause.satisfied(values):
                        return fail(clause)
                elif len(open_vars) == 1:
                    u = open_vars[0]
                    options = []
                    for value in (True, False):
                        values[u] = value
                        if clause.satisfied(values):
                            options.append(value)
                        del values[u]
                    if not options:
                        return fail(clause)
                    if len(options) == 1:
                        values[u] = options[0]
                        queue.append(u)
        return True

    root: Dict[Pair, bool] = {}
    queue: List[Pair] = []
    for clause in problem.clauses:
        if len(clause.variables) != 1:
            continue
        var = clause.variables[0]
        options = [v for v in (True, False) if clause.satisfied({var: v})]
        if var in root:
            if root[var] not in options:
                fail(clause)
                return result
            continue
        if not options:
            fail(clause)
            return result
        if len(options) == 1:
            root[var] = options[0]
            queue.append(var)
    if not propagate(root, queue):
        return result

    def search(values: Dict[Pair, bool]) -> None:
        if len(result.solutions) >= cap:
            return
        free = next((v for v in problem.variables if v not in values), None)
        if free is None:
            result.solutions.append(dict(values))
            return
        for value in (True, False):
            trial = dict(values)
            trial[free] = value
            if propagate(trial, [free]):
                search(trial)
            if len(result.solutions) >= cap:
                return

    search(root)
    return result


def _region_of(problem: LayerProblem, faces: Sequence[int]) -> List[float]:
    wanted = set(faces)
    for cell in problem.cells:
        if wanted.issubset(cell.faces):
            return [round(cell.point[0], 6), round(cell.point[1], 6)]
    for cell in problem.cells:
        if wanted & set(cell.faces):
            return [round(cell.point[0], 6), round(cell.point[1], 6)]
    return []


def layer_solve(problem: LayerProblem, cap: int = SOLUTION_CAP) -> FrozenSet[Pair]:
    """
    Unique layer order as a set of (above, below) face pairs.

    Raises:
        CompileError: PSI E_PHYS_SELF_INTERSECTION when no order exists,
            AFS E_AMBIGUOUS_LAYER_ORDER when at least two do
    """
    search = solve_layers(problem, cap)
    if not search.solutions:
        clause = search.conflict
        faces = sorted(set(clause.faces)) if clause else sorted(problem.variables[0])
        edges = list(clause.edges) if clause else []
        raise CompileError([make_diagnostic(
            'E_PHYS_SELF_INTERSECTION',
            faulty_crease_ids=edges,
            intersecting_facet_ids=faces,
            intersecting_layer_ids=faces,
            problematic_coordinates_or_regions=_region_of(problem, faces),
            cycle=clause.kind if clause else 'crease',
        )])
    if len(search.solutions) > 1:
        first, second = search.solutions[0], search.solutions[1]
        a, b = next(v for v in problem.variables if first[v] != second[v])
        raise CompileError([make_diagnostic(
            'E_AMBIGUOUS_LAYER_ORDER',
            layer_a_id=a, layer_b_id=b,
            number_of_possible_states=len(search.solutions),
            problematic_coordinates_or_regions=_region_of(problem, (a, b)),
            suggested_disambiguation=DISAMBIGUATION_HINT,
        )])
    solution = search.solutions[0]
    return frozenset((a, b) if up else (b, a) for (a, b), up in solution.items())


# ---------------------------------------------------------------------------
# Folding
# ---------------------------------------------------------------------------

def _face_layers(count: int, order: FrozenSet[Pair]) -> Tuple[int, ...]:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(count))
    graph.add_edges_from(sorted(order))
    try:
        ranked = list(nx.topological_sort(graph))
    except nx.NetworkXUnfeasible:
        logger.warning('Layer order has a cycle across cells (%s); layers flattened',
                       nx.find_cycle(graph))
        return tuple(0 for _ in range(count))
    # depth above the lowest face beneath; faces covering nothing sit at 0
    layers = [0] * count
    for f in reversed(ranked):
        layers[f] = max((layers[b] + 1 for b in graph.successors(f)), default=0)
    return tuple(layers)


def _assemble(
    cp: CreasePattern,
    transforms: Sequence[PlanarIsometry],
    problem: Optional[LayerProblem],
    order: FrozenSet[Pair],
    simplified: bool = False
) -> FoldedState:
    points = []
    for v, xy in enumerate(cp.vertices_coords):
        faces = cp.faces_at_vertex(v)
        iso = transforms[faces[0]] if faces else PlanarIsometry.identity()
        points.append(iso.apply(xy))

    cells: Tuple[OverlapCell, ...] = ()
    constraints: Tuple[OverlapConstraint, ...] = ()
    if problem is not None:
        stacked = []
        for cell in problem.cells:
            above_count = {
                f: sum(1 for g in cell.faces if g != f and (g, f) in order)
                for f in cell.faces
            }
            stack = tuple(sorted(cell.faces, key=lambda f: (above_count[f], f)))
            stacked.append(replace(cell, stack=stack))
        cells = tuple(stacked)
        constraints = tuple(problem.constraints)

    return FoldedState(
        cp=cp,
        P=tuple(points),
        SP=tuple((i, j, e) for e, (i, j) in enumerate(cp.edges_vertices)),
        face_isometries=tuple(transforms),
        layer_order=order,
        cells=cells,
        constraints=constraints,
        face_layers=_face_layers(cp.num_faces, order),
        simplified=simplified,
    )


def _unassigned_creases(cp: CreasePattern) -> List[int]:
    return [e for e, a in enumerate(cp.effective_assignments) if a == 'U']


def fold(cp: CreasePattern, config: Optional[FoldConfig] = None) -> FoldedState:
    """
    Compile a crease pattern into its flat-folded state.

    Args:
        cp: Crease pattern
        config: Layer cap and unassigned-crease handling

    Returns:
        FoldedState with P, SP, face isometries, layer order and CF stacks

    Raises:
        CompileError: CSE (structure), GIF (local laws, closure, layer cap),
            PSI (no consistent layer order), AFS (unassigned creases or
            several layer orders)
    """
    config = config or FoldConfig()
    report = validate_structure(cp)
    if not report.valid:
        raise CompileError(report.errors)

    unassigned = _unassigned_creases(cp)
    if unassigned:
        if not config.auto_complete:
            raise CompileError([make_diagnostic(
                'E_AMBIGUOUS_MOUNTAIN_VALLEY_ASSIGNMENT',
                ambiguous_crease_ids_or_vertex_ids=unassigned,
                suggested_disambiguation=DISAMBIGUATION_HINT,
            )])
        cp = complete_unassigned(cp, config)

    local = check_flat_foldable_all(cp)
    if local:
        raise CompileError(local)

    transforms = compute_face_transforms(cp)
    problem = build_layer_problem(cp, transforms, config)
    order = layer_solve(problem)
    return _assemble(cp, transforms, problem, order)


def simplified_fold(cp: CreasePattern) -> FoldedState:
    """Fallback state: original coordinates, identity isometries, no layers."""
    identity = tuple(PlanarIsometry.identity() for _ in cp.faces_vertices)
    return _assemble(cp, identity, None, frozenset(), simplified=True)


def complete_unassigned(cp: CreasePattern, config: Optional[FoldConfig] = None) -> CreasePattern:
    """
    Assign every U crease M or V; the first labeling that folds uniquely wins.

    Raises:
        CompileError: AFS E_AMBIGUOUS_MOUNTAIN_VALLEY_ASSIGNMENT when there are
            too many U creases or no labeling folds
    """
    config = config or FoldConfig()
    unassigned = _unassigned_creases(cp)
    if not unassigned:
        return cp
    ambiguous = make_diagnostic(
        'E_AMBIGUOUS_MOUNTAIN_VALLEY_ASSIGNMENT',
        ambiguous_crease_ids_or_vertex_ids=unassigned,
        suggested_disambiguation=DISAMBIGUATION_HINT,
    )
    if len(unassigned) > COMPLETION_CAP:
        raise CompileError([ambiguous])

    strict = replace(config, auto_complete=False)
    base = list(cp.effective_assignments)
    for labels in itertools.product(FOLDED, repeat=len(unassigned)):
        codes = list(base)
        for e, code in zip(unassigned, labels):
            codes[e] = code
        candidate = replace(cp, edges_assignment=tuple(codes))
        try:
            fold(candidate, strict)
        except CompileError:
            continue
        logger.info('Completed %d unassigned crease(s)', len(unassigned))
        return candidate
    raise CompileError([ambiguous])


def extract_constraints(state: FoldedState) -> Tuple[OverlapConstraint, ...]:
    """Canonical, deduplicated overlap constraints of a folded state."""
    unique = {}
    for constraint in state.constraints:
        unique.setdefault((constraint.kind, constraint.faces, constraint.edges), constraint)
    return tuple(unique[k] for k in sorted(unique))


def constraints_for(cp: CreasePattern, config: Optional[FoldConfig] = None) -> Tuple[OverlapConstraint, ...]:
    """Constraints of a CP whose layer search may fail; empty when geometry fails."""
    try:
        if not validate_structure(cp).valid:
            return ()
        transforms = compute_face_transforms(cp)
        problem = build_layer_problem(cp, transforms, config)
    except CompileError:
        return ()
    return tuple(problem.constraints)


def dihedral_angles(state: FoldedState) -> List[float]:
    """0° for a folded crease (parities differ), 180° for a flat one; B edges skipped."""
    cp = state.cp
    angles = []
    for e, faces in enumerate(cp.edge_faces):
        if cp.effective_assignments[e] == 'B' or len(faces) != 2:
            continue
        f, g = faces
        angles.append(0.0 if state.parity(f) != state.parity(g) else 180.0)
    return angles


def export_state(state: FoldedState) -> Dict:
    """FoldedState export document: P, SP and CF."""
    return {
        'P': [[x, y, state.vertex_layer(v)] for v, (x, y) in enumerate(state.P)],
        'SP': [[i, j, e] for i, j, e in state.SP],
        'CF': [
            {'polygon': [[x, y] for x, y in cell.polygon], 'faces': list(cell.stack)}
            for cell in state.cells
        ],
    }
