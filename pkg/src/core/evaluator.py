"""
Evaluator module - similarity between a generated CP and a reference CP.

Four equally weighted dimensions:

- topological (vertex counts, degree/connectivity, faces, crease labels)
- geometric (folded point clouds, dihedral angles, bounding-box proportions)
- foldability constraints (taco-taco, taco-tortilla, transitivity, local laws)
- final folded state (folded shape and layer agreement)

Each dimension has flat fallback scores for inputs that cannot be folded;
every fallback that fires is recorded on the ScoreReport.
"""

import logging
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import cdist
from scipy.stats import wasserstein_distance
from shapely.geometry import Polygon

from src.core.config import EvalConfig, FoldConfig
from src.core.cp_model import CreasePattern, parse_cp, validate_structure
from src.core.diagnostics import CompileError, Diagnostic
from src.core.foldability import kawasaki_everywhere, maekawa_everywhere
from src.core.folder import (
    CONSTRAINT_KINDS,
    FoldedState,
    constraints_for,
    dihedral_angles,
    fold,
    simplified_fold,
)
from src.core.geometry import quantize

logger = logging.getLogger(__name__)

# Dimension weights
W_DIMENSION = 0.25
TSS_WEIGHTS = {'s_v': 0.2, 's_edge': 0.3, 's_face': 0.3, 's_crease': 0.2}
GS_WEIGHTS = {'s_point': 0.4, 's_angle': 0.3, 's_size': 0.3}
CS_WEIGHTS = {'TacoTaco': 0.3, 'TacoTortilla': 0.3, 'Transitivity': 0.2, 's_flatfold': 0.2}
FFS_WEIGHTS = {'s_shape': 0.7, 's_layer': 0.3}

# Flat fallback scores
LOW_SCORE = 0.2
ERROR_SCORE = 0.3
DEFAULT_SCORE = 0.5

ANGLE_BINS = 18


@dataclass
class TopologicalScore:
    s_v: float
    s_degree: float
    s_conn: float
    s_edge: float
    s_fcount: float
    s_favgv: float
    s_fdist: float
    s_face: float
    s_M: Optional[float]
    s_V: Optional[float]
    s_B: Optional[float]
    p_L: Optional[float]
    s_crease: float
    score: float


@dataclass
class GeometricScore:
    # sub-scores stay None when the flat no-model score is used
    s_point: Optional[float]
    s_angle: Optional[float]
    s_size: Optional[float]
    score: float


@dataclass
class ConstraintScore:
    s_TT: Optional[float]
    s_TTo: Optional[float]
    s_Trans: Optional[float]
    s_K: Optional[float]
    s_Mk: Optional[float]
    s_flatfold: Optional[float]
    score: float
    counts: Dict[str, List[int]] = field(default_factory=dict)


@dataclass
class FinalStateScore:
    s_shape: Optional[float]
    s_layer: Optional[float]
    score: float


@dataclass
class ScoreReport:
    """Full sub-score tree for one generated/reference pair."""
    tss: TopologicalScore
    gs: GeometricScore
    cs: ConstraintScore
    ffs: FinalStateScore
    total: float
    mode: str = 'full'
    fallbacks: List[str] = field(default_factory=list)
    diagnostics: List[Diagnostic] = field(default_factory=list)

    @property
    def dimensions(self) -> Dict[str, float]:
        return {
            'S_topological': self.tss.score,
            'S_geometric': self.gs.score,
            'S_foldability': self.cs.score,
            'S_final_state': self.ffs.score,
        }

    def to_dict(self) -> Dict:
        """Export document: sub-score tree, dimension scores, total and flags."""
        return {
            'tss': asdict(self.tss),
            'gs': asdict(self.gs),
            'cs': asdict(self.cs),
            'ffs': asdict(self.ffs),
            **self.dimensions,
            'S_total': self.total,
            'mode': self.mode,
            'fallbacks': list(self.fallbacks),
            'diagnostics': [d.code for d in self.diagnostics],
        }


@dataclass(frozen=True)
class Compilation:
    """Outcome of folding one CP for scoring."""
    cp: CreasePattern
    # None when the structure is invalid; simplified when folding failed
    state: Optional[FoldedState]
    diagnostics: Tuple[Diagnostic, ...] = ()

    @property
    def foldable(self) -> bool:
        return self.state is not None and not self.state.simplified


def compile_cp(cp: CreasePattern, fold_config: Optional[FoldConfig] = None) -> Compilation:
    """Fold cp, falling back to the simplified state when only folding fails."""
    try:
        return Compilation(cp, fold(cp, fold_config))
    except CompileError as exc:
        if not validate_structure(cp).valid:
            return Compilation(cp, None, exc.diagnostics)
        return Compilation(cp, simplified_fold(cp), exc.diagnostics)


# ---------------------------------------------------------------------------
# Metric primitives
# ---------------------------------------------------------------------------

def wasserstein_1d(h1: Sequence[float], h2: Sequence[float]) -> float:
    """
    Earth mover's distance between two histograms on a shared unit support.

    Raises:
        ValueError: if the bin counts differ or are zero
    """
    a = np.asarray(h1, dtype=float)
    b = np.asarray(h2, dtype=float)
    if a.shape != b.shape or a.size == 0:
        raise ValueError(f"Histogram bins differ: {a.size} vs {b.size}")
    n = a.size
    if n == 1:
        return 0.0
    if a.sum() <= 0:
        a = np.ones(n)
    if b.sum() <= 0:
        b = np.ones(n)
    support = np.arange(n) / (n - 1)
    distance = wasserstein_distance(support, support, a / a.sum(), b / b.sum())
    return float(min(1.0, max(0.0, distance)))


def hausdorff_bidirectional(a, b) -> float:
    """
    Symmetric Hausdorff distance between two point sets.

    Raises:
        ValueError: if either set is empty
    """
    pa = np.asarray(a, dtype=float)
    pb = np.asarray(b, dtype=float)
    if pa.size == 0 or pb.size == 0:
        raise ValueError('Hausdorff distance needs two nonempty point sets')
    distance_matrix = cdist(pa.reshape(len(pa), -1), pb.reshape(len(pb), -1))
    forward = np.max(np.min(distance_matrix, axis=1))
    backward = np.max(np.min(distance_matrix, axis=0))
    return float(max(forward, backward))


def normalize_points(points) -> np.ndarray:
    """Centre on the centroid and scale to unit maximum radius."""
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return pts
    centred = pts - pts.mean(axis=0)
    radius = float(np.max(np.linalg.norm(centred, axis=1)))
    if radius < 1e-12:
        return np.zeros_like(centred)
    return centred / radius


def cosine_similarity(u, v) -> float:
    a = np.asarray(u, dtype=float)
    b = np.asarray(v, dtype=float)
    na, nb = float(np.linalg.norm(a)), float(np.linalg.norm(b))
    if na == 0.0 and nb == 0.0:
        return 1.0
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(min(1.0, max(0.0, float(a @ b) / (na * nb))))


def _ratio_score(x: float, y: float) -> float:
    """exp(-|x - y| / max(1, min(x, y)))"""
    return math.exp(-abs(x - y) / max(1.0, min(x, y)))


def _clamp(value: float) -> float:
    return float(min(1.0, max(0.0, value)))


# ---------------------------------------------------------------------------
# Topological similarity
# ---------------------------------------------------------------------------

def _valid_edges(cp: CreasePattern) -> List[Tuple[int, int]]:
    n = cp.num_vertices
    return [(i, j) for i, j in cp.edges_vertices
            if isinstance(i, int) and isinstance(j, int) and 0 <= i < n and 0 <= j < n]


def vertex_degrees(cp: CreasePattern) -> List[int]:
    degrees = [0] * cp.num_vertices
    for i, j in _valid_edges(cp):
        degrees[i] += 1
        degrees[j] += 1
    return degrees


def component_count(cp: CreasePattern) -> int:
    """Connected components of the vertex/edge graph."""
    n = cp.num_vertices
    if n == 0:
        return 0
    edges = _valid_edges(cp)
    rows = [i for i, _ in edges]
    cols = [j for _, j in edges]
    graph = coo_matrix((np.ones(len(edges)), (rows, cols)), shape=(n, n))
    count, _ = connected_components(graph, directed=False)
    return int(count)


def _histogram(values: Sequence[int], top: int) -> np.ndarray:
    return np.bincount(np.asarray(values, dtype=int), minlength=top + 1)[: top + 1]


def _distribution_similarity(gen: Sequence[int], ref: Sequence[int]) -> float:
    top = max([0, *gen, *ref])
    return 1.0 - wasserstein_1d(_histogram(gen, top), _histogram(ref, top))


def vertex_count_score(v_gen: int, v_ref: int) -> float:
    if v_gen == v_ref:
        return 1.0
    low, high = min(v_gen, v_ref), max(v_gen, v_ref)
    if low == 0:
        return 0.0
    return math.exp(-0.5 * (high - low) / low)


def crease_score(gen: CreasePattern, ref: CreasePattern) -> Tuple[float, Dict[str, Optional[float]]]:
    """Assignment proportion similarity times the length penalty."""
    empty = {'s_M': None, 's_V': None, 's_B': None, 'p_L': None}
    if not gen.has_assignments or not ref.has_assignments:
        return LOW_SCORE, empty

    def proportions(cp: CreasePattern) -> Dict[str, float]:
        counts = cp.assignment_counts()
        total = len(cp.edges_assignment)
        return {code: counts.get(code, 0) / total for code in ('M', 'V', 'B')}

    pg, pr = proportions(gen), proportions(ref)
    parts = {f's_{code}': 1.0 - abs(pg[code] - pr[code]) for code in ('M', 'V', 'B')}
    lengths = (len(gen.edges_assignment), len(ref.edges_assignment))
    parts['p_L'] = min(lengths) / max(lengths)
    value = (0.4 * parts['s_M'] + 0.4 * parts['s_V'] + 0.2 * parts['s_B']) * parts['p_L']
    return _clamp(value), parts


def score_topological(gen: CreasePattern, ref: CreasePattern,
                      fallbacks: Optional[List[str]] = None) -> TopologicalScore:
    """
    Topological similarity of two parsed CPs (structural validity not required).

    Args:
        gen: Generated crease pattern
        ref: Reference crease pattern
        fallbacks: List collecting the names of fired fallbacks

    Returns:
        TopologicalScore with every sub-score
    """
    fallbacks = fallbacks if fallbacks is not None else []
    s_v = vertex_count_score(gen.num_vertices, ref.num_vertices)

    s_degree = _distribution_similarity(vertex_degrees(gen), vertex_degrees(ref))
    c_gen, c_ref = component_count(gen), component_count(ref)
    s_conn = 1.0 if c_gen == c_ref else math.exp(-abs(c_gen - c_ref))
    s_edge = 0.7 * s_degree + 0.3 * s_conn

    sizes_gen = [len(f) for f in gen.faces_vertices]
    sizes_ref = [len(f) for f in ref.faces_vertices]
    s_fcount = _ratio_score(len(sizes_gen), len(sizes_ref))
    avg_gen = float(np.mean(sizes_gen)) if sizes_gen else 0.0
    avg_ref = float(np.mean(sizes_ref)) if sizes_ref else 0.0
    s_favgv = _ratio_score(avg_gen, avg_ref)
    s_fdist = _distribution_similarity(sizes_gen, sizes_ref)
    s_face = 0.3 * s_fcount + 0.3 * s_favgv + 0.4 * s_fdist

    s_crease, parts = crease_score(gen, ref)
    if parts['p_L'] is None:
        fallbacks.append('tss.s_crease:no-assignments')

    score = (TSS_WEIGHTS['s_v'] * s_v + TSS_WEIGHTS['s_edge'] * s_edge
             + TSS_WEIGHTS['s_face'] * s_face + TSS_WEIGHTS['s_crease'] * s_crease)
    return TopologicalScore(
        s_v=s_v, s_degree=s_degree, s_conn=s_conn, s_edge=s_edge,
        s_fcount=s_fcount, s_favgv=s_favgv, s_fdist=s_fdist, s_face=s_face,
        s_M=parts['s_M'], s_V=parts['s_V'], s_B=parts['s_B'], p_L=parts['p_L'],
        s_crease=s_crease, score=_clamp(score),
    )


# ---------------------------------------------------------------------------
# Geometric similarity
# ---------------------------------------------------------------------------

def state_points(state: FoldedState) -> np.ndarray:
    """Folded vertex positions as a 3D point cloud (flat fold, z = 0)."""
    if not state.P:
        return np.zeros((0, 3))
    pts = np.asarray(state.P, dtype=float)
    return np.column_stack([pts, np.zeros(len(pts))])


def hausdorff_score(d_h: float, k: float) -> float:
    return math.exp(-k * d_h)


def point_score(gen: np.ndarray, ref: np.ndarray, k: float) -> float:
    d_h = hausdorff_bidirectional(normalize_points(gen), normalize_points(ref))
    return hausdorff_score(d_h, k)


def angle_histogram(angles: Sequence[float]) -> np.ndarray:
    hist, _ = np.histogram(np.asarray(angles, dtype=float), bins=ANGLE_BINS, range=(0.0, 180.0))
    return hist


def angle_score(gen_angles: Sequence[float], ref_angles: Sequence[float]) -> Optional[float]:
    """Cosine of dihedral histograms; None when only one side has creases."""
    if not gen_angles and not ref_angles:
        return 1.0
    if not gen_angles or not ref_angles:
        return None
    return cosine_similarity(angle_histogram(gen_angles), angle_histogram(ref_angles))


def size_score(gen: np.ndarray, ref: np.ndarray) -> Optional[float]:
    if gen.size == 0 or ref.size == 0:
        return None

    def proportions(points: np.ndarray) -> np.ndarray:
        dims = np.sort(points.max(axis=0) - points.min(axis=0))[::-1]
        return dims / dims[0] if dims[0] > 0 else dims

    return cosine_similarity(proportions(gen), proportions(ref))


def score_geometric(gen_state: Optional[FoldedState], ref_state: Optional[FoldedState],
                    config: Optional[EvalConfig] = None,
                    fallbacks: Optional[List[str]] = None) -> GeometricScore:
    """Geometric similarity of two folded (or simplified) states."""
    config = config or EvalConfig()
    fallbacks = fallbacks if fallbacks is not None else []
    if gen_state is None or ref_state is None or not gen_state.P or not ref_state.P:
        fallbacks.append('gs:no-model')
        return GeometricScore(None, None, None, LOW_SCORE)

    gen_pts, ref_pts = state_points(gen_state), state_points(ref_state)
    s_point = point_score(gen_pts, ref_pts, config.k)

    s_angle = angle_score(dihedral_angles(gen_state), dihedral_angles(ref_state))
    if s_angle is None:
        fallbacks.append('gs.s_angle:no-creases')
        s_angle = DEFAULT_SCORE
    s_size = size_score(gen_pts, ref_pts)
    if s_size is None:
        fallbacks.append('gs.s_size:no-points')
        s_size = DEFAULT_SCORE

    score = (GS_WEIGHTS['s_point'] * s_point + GS_WEIGHTS['s_angle'] * s_angle
             + GS_WEIGHTS['s_size'] * s_size)
    return GeometricScore(s_point=s_point, s_angle=s_angle, s_size=s_size, score=_clamp(score))


# ---------------------------------------------------------------------------
# Constraint similarity
# ---------------------------------------------------------------------------

def _constraint_keys(compilation: Compilation, config: EvalConfig) -> Dict[str, Set[tuple]]:
    if compilation.foldable:
        constraints = compilation.state.constraints
    else:
        constraints = constraints_for(compilation.cp, config.fold)
    keys: Dict[str, Set[tuple]] = {kind: set() for kind in CONSTRAINT_KINDS}
    for constraint in constraints:
        keys[constraint.kind].add(constraint.key(config.constraint_keys))
    return keys


def constraint_kind_score(gen: Set[tuple], ref: Set[tuple]) -> Optional[float]:
    """Jaccard plus count agreement; None when exactly one side is empty."""
    if not gen and not ref:
        return 1.0
    if not gen or not ref:
        return None
    jaccard = len(gen & ref) / len(gen | ref)
    return 0.7 * jaccard + 0.3 * _ratio_score(len(gen), len(ref))


def _law_score(ref_holds: bool, gen_holds: bool) -> float:
    return LOW_SCORE if ref_holds and not gen_holds else 1.0


def score_constraints(gen: Compilation, ref: Compilation,
                      config: Optional[EvalConfig] = None,
                      fallbacks: Optional[List[str]] = None) -> ConstraintScore:
    """Foldability-constraint similarity with the foldability gate."""
    config = config or EvalConfig()
    fallbacks = fallbacks if fallbacks is not None else []
    if ref.foldable and not gen.foldable:
        fallbacks.append('cs:gate')
        return ConstraintScore(None, None, None, None, None, None, LOW_SCORE)

    try:
        gen_keys = _constraint_keys(gen, config)
        ref_keys = _constraint_keys(ref, config)
        kinds = {}
        for kind in CONSTRAINT_KINDS:
            value = constraint_kind_score(gen_keys[kind], ref_keys[kind])
            if value is None:
                fallbacks.append(f'cs.{kind}:one-side-empty')
                value = ERROR_SCORE
            kinds[kind] = value

        s_k = _law_score(kawasaki_everywhere(ref.cp), kawasaki_everywhere(gen.cp))
        s_mk = _law_score(maekawa_everywhere(ref.cp), maekawa_everywhere(gen.cp))
    except (CompileError, ValueError, IndexError, KeyError) as exc:
        logger.debug('Constraint scoring failed: %s', exc)
        fallbacks.append('cs:error')
        return ConstraintScore(None, None, None, None, None, None, ERROR_SCORE)

    if s_k < 1.0:
        fallbacks.append('cs.s_K:kawasaki')
    if s_mk < 1.0:
        fallbacks.append('cs.s_Mk:maekawa')
    s_flatfold = 0.5 * s_k + 0.5 * s_mk
    score = sum(CS_WEIGHTS[kind] * kinds[kind] for kind in CONSTRAINT_KINDS)
    score += CS_WEIGHTS['s_flatfold'] * s_flatfold
    return ConstraintScore(
        s_TT=kinds['TacoTaco'], s_TTo=kinds['TacoTortilla'], s_Trans=kinds['Transitivity'],
        s_K=s_k, s_Mk=s_mk, s_flatfold=s_flatfold, score=_clamp(score),
        counts={kind: [len(gen_keys[kind]), len(ref_keys[kind])] for kind in CONSTRAINT_KINDS},
    )


# ---------------------------------------------------------------------------
# Final-state similarity
# ---------------------------------------------------------------------------

def _face_keys(state: FoldedState) -> Dict[int, tuple]:
    keys = {}
    for f in range(state.cp.num_faces):
        source = Polygon(state.cp.face_coords(f)).centroid
        folded = Polygon(state.face_polygon(f)).centroid
        keys[f] = (quantize(source.x), quantize(source.y),
                   quantize(folded.x), quantize(folded.y))
    return keys


def _relations(order, rename=None) -> Dict[Tuple, bool]:
    """Unordered face pair -> True when the first (sorted) face is on top."""
    result = {}
    for top, bottom in order:
        a, b = (top, bottom) if rename is None else (rename.get(top), rename.get(bottom))
        if a is None or b is None:
            a, b = ('gen', top), ('gen', bottom)
        pair = tuple(sorted((a, b), key=repr))
        result[pair] = pair[0] == a
    return result


def layer_agreement(gen_state: FoldedState, ref_state: FoldedState) -> Optional[float]:
    """
    Fraction of overlapping face pairs whose above/below relation agrees.

    Faces are matched by quantized source and folded centroids. Returns None
    when either side has no computed layers.
    """
    if gen_state.simplified or ref_state.simplified:
        return None
    ref_by_key = {key: f for f, key in _face_keys(ref_state).items()}
    rename = {}
    for f, key in _face_keys(gen_state).items():
        if key in ref_by_key:
            rename[f] = ref_by_key[key]
    gen_rel = _relations(gen_state.layer_order, rename)
    ref_rel = _relations(ref_state.layer_order)
    pairs = set(gen_rel) | set(ref_rel)
    if not pairs:
        return 1.0
    agree = sum(1 for p in pairs if p in gen_rel and p in ref_rel and gen_rel[p] == ref_rel[p])
    return agree / len(pairs)


def score_final_state(gen: Compilation, ref: Compilation,
                      config: Optional[EvalConfig] = None,
                      fallbacks: Optional[List[str]] = None) -> FinalStateScore:
    """Folded shape and layer agreement of two compiled states."""
    config = config or EvalConfig()
    fallbacks = fallbacks if fallbacks is not None else []
    usable = (lambda c: c.foldable) if not config.simplified_final_state else (
        lambda c: c.state is not None)
    if not usable(gen) or not usable(ref):
        fallbacks.append('ffs:compile-failed')
        return FinalStateScore(None, None, ERROR_SCORE)

    try:
        s_shape = point_score(state_points(gen.state), state_points(ref.state), config.k)
    except ValueError as exc:
        logger.debug('Final-state shape failed: %s', exc)
        fallbacks.append('ffs:compile-failed')
        return FinalStateScore(None, None, ERROR_SCORE)

    if config.mode == 'paper-faithful':
        fallbacks.append('ffs.s_layer:placeholder')
        s_layer = DEFAULT_SCORE
    else:
        s_layer = layer_agreement(gen.state, ref.state)
        if s_layer is None:
            fallbacks.append('ffs.s_layer:no-layers')
            s_layer = DEFAULT_SCORE

    score = FFS_WEIGHTS['s_shape'] * s_shape + FFS_WEIGHTS['s_layer'] * s_layer
    return FinalStateScore(s_shape=s_shape, s_layer=s_layer, score=_clamp(score))


# ---------------------------------------------------------------------------
# Totals
# ---------------------------------------------------------------------------

def score_compiled(gen: Compilation, ref: Compilation,
                   config: Optional[EvalConfig] = None) -> ScoreReport:
    """Score two already compiled CPs."""
    config = config or EvalConfig()
    fallbacks: List[str] = []
    tss = score_topological(gen.cp, ref.cp, fallbacks)
    gs = score_geometric(gen.state, ref.state, config, fallbacks)
    cs = score_constraints(gen, ref, config, fallbacks)
    ffs = score_final_state(gen, ref, config, fallbacks)
    total = W_DIMENSION * (tss.score + gs.score + cs.score + ffs.score)
    if fallbacks:
        logger.debug('Fallbacks fired: %s', ', '.join(fallbacks))
    return ScoreReport(
        tss=tss, gs=gs, cs=cs, ffs=ffs, total=total, mode=config.mode,
        fallbacks=fallbacks, diagnostics=list(gen.diagnostics),
    )


def score_total(gen: CreasePattern, ref: CreasePattern,
                config: Optional[EvalConfig] = None) -> ScoreReport:
    """
    Score a generated CP against a reference CP.

    Args:
        gen: Generated crease pattern (may be invalid or unfoldable)
        ref: Reference crease pattern
        config: Scoring mode, sensitivity and constraint keying

    Returns:
        ScoreReport with S_total = 0.25 * (sum of the four dimensions)
    """
    config = config or EvalConfig()
    return score_compiled(compile_cp(gen, config.fold), compile_cp(ref, config.fold), config)


def score_documents(gen_text: str, ref_text: str,
                    config: Optional[EvalConfig] = None) -> ScoreReport:
    """
    Parse two CP documents and score them.

    Raises:
        CompileError: with CSE diagnostics when either document does not parse
    """
    return score_total(parse_cp(gen_text), parse_cp(ref_text), config)


def partial_score(gen, ref, config: Optional[EvalConfig] = None) -> float:
    """
    S_partial: S_total with the simplified state standing in for failed folds.

    gen and ref may be CreasePatterns or Compilations.
    """
    config = replace(config or EvalConfig(), simplified_final_state=True)
    gen_c = gen if isinstance(gen, Compilation) else compile_cp(gen, config.fold)
    ref_c = ref if isinstance(ref, Compilation) else compile_cp(ref, config.fold)
    return score_compiled(gen_c, ref_c, config).total
