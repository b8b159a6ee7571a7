"""
Geometry module - the planar kernel shared by every other stage.

Isometries, sector angles around a vertex, and polygon/segment predicates.
Polygon work goes through shapely; small dense math through numpy.
"""

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Optional, Sequence, Tuple

import numpy as np
from shapely.geometry import LinearRing, LineString, Polygon
from shapely.validation import explain_validity

from src.core.diagnostics import CompileError, make_diagnostic

if TYPE_CHECKING:
    from src.core.cp_model import CreasePattern

# Point coincidence tolerance (unit-square coordinates)
EPS = 1e-9
# Angular tolerance in radians
ANGLE_EPS = 1e-6
TWO_PI = 2.0 * math.pi

Point = Tuple[float, float]


@dataclass(frozen=True)
class PlanarIsometry:
    """
    x -> L x + t with L orthogonal.

    linear holds L row-major as (a, b, c, d) for [[a, b], [c, d]].
    """
    linear: Tuple[float, float, float, float] = (1.0, 0.0, 0.0, 1.0)
    translation: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        a, b, c, d = self.linear
        if (abs(a * a + c * c - 1.0) > EPS or abs(b * b + d * d - 1.0) > EPS
                or abs(a * b + c * d) > EPS):
            raise ValueError(f"Linear part is not orthogonal: {self.linear}")

    @classmethod
    def identity(cls) -> 'PlanarIsometry':
        return cls()

    @property
    def parity(self) -> int:
        a, b, c, d = self.linear
        return 1 if a * d - b * c > 0 else -1

    def matrix(self) -> np.ndarray:
        return np.array(self.linear, dtype=float).reshape(2, 2)

    def apply(self, point: Sequence[float]) -> Point:
        a, b, c, d = self.linear
        x, y = point
        return (a * x + b * y + self.translation[0], c * x + d * y + self.translation[1])

    def apply_many(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        return pts @ self.matrix().T + np.asarray(self.translation)

    def compose(self, other: 'PlanarIsometry') -> 'PlanarIsometry':
        """Return self ∘ other (apply other first)."""
        m = self.matrix() @ other.matrix()
        t = self.matrix() @ np.asarray(other.translation) + np.asarray(self.translation)
        return PlanarIsometry(tuple(float(v) for v in m.ravel()), (float(t[0]), float(t[1])))

    def inverse(self) -> 'PlanarIsometry':
        mt = self.matrix().T
        t = -mt @ np.asarray(self.translation)
        return PlanarIsometry(tuple(float(v) for v in mt.ravel()), (float(t[0]), float(t[1])))

    def is_close(self, other: 'PlanarIsometry', tol: float = EPS) -> bool:
        return bool(
            np.allclose(self.linear, other.linear, rtol=0.0, atol=tol)
            and np.allclose(self.translation, other.translation, rtol=0.0, atol=tol)
        )


def reflect_across(point: Sequence[float], direction: Sequence[float]) -> PlanarIsometry:
    """
    Reflection across the line through point with the given direction.

    Raises:
        ValueError: if direction is the zero vector
    """
    norm = math.hypot(direction[0], direction[1])
    if norm < EPS:
        raise ValueError('Reflection line needs a nonzero direction')
    dx, dy = direction[0] / norm, direction[1] / norm
    linear = (dx * dx - dy * dy, 2 * dx * dy, 2 * dx * dy, dy * dy - dx * dx)
    px, py = point
    rx = linear[0] * px + linear[1] * py
    ry = linear[2] * px + linear[3] * py
    return PlanarIsometry(linear, (px - rx, py - ry))


def bearing(origin: Sequence[float], target: Sequence[float]) -> float:
    """Direction angle of origin->target in [0, 2π)."""
    angle = math.atan2(target[1] - origin[1], target[0] - origin[0])
    return angle % TWO_PI


def _ccw_gap(start: float, end: float) -> float:
    gap = (end - start) % TWO_PI
    return gap


@dataclass(frozen=True)
class SectorAngles:
    """Angles between consecutive edges around a vertex, counterclockwise."""
    vertex: int
    angles: Tuple[float, ...]
    # edges[i] and edges[i + 1] (cyclic for interior vertices) bound angles[i]
    edges: Tuple[int, ...]
    boundary: bool = False

    @property
    def total(self) -> float:
        return float(sum(self.angles))

    def degrees(self) -> Tuple[float, ...]:
        return tuple(math.degrees(a) for a in self.angles)


def face_wedges(cp: 'CreasePattern', v: int) -> Tuple[Tuple[float, float], ...]:
    """(start bearing, sweep) of every face corner at v."""
    coords = cp.vertices_coords
    wedges = []
    for face in cp.faces_at_vertex(v):
        cycle = cp.faces_vertices[face]
        k = cycle.index(v)
        nxt = coords[cycle[(k + 1) % len(cycle)]]
        prv = coords[cycle[k - 1]]
        start = bearing(coords[v], nxt)
        wedges.append((start, _ccw_gap(start, bearing(coords[v], prv))))
    return tuple(wedges)


def sector_angles(
    cp: 'CreasePattern',
    v: int,
    include: Optional[Iterable[str]] = None
) -> SectorAngles:
    """
    Sector angles around vertex v.

    Args:
        cp: Crease pattern
        v: Vertex index
        include: Effective assignments to keep (e.g. fold creases only);
            boundary edges are always kept

    Returns:
        SectorAngles; at boundary vertices only sectors covered by paper

    Raises:
        CompileError: GIF E_GEOM_CREASE_PLACEMENT_INVALID on a zero-length edge
    """
    kinds = set(include) if include is not None else None
    coords = cp.vertices_coords
    assignments = cp.effective_assignments
    origin = coords[v]

    rays = []
    for e in cp.vertex_edges[v]:
        if kinds is not None and assignments[e] != 'B' and assignments[e] not in kinds:
            continue
        i, j = cp.edges_vertices[e]
        other = coords[j if i == v else i]
        if math.hypot(other[0] - origin[0], other[1] - origin[1]) < EPS:
            raise CompileError([make_diagnostic(
                'E_GEOM_CREASE_PLACEMENT_INVALID',
                faulty_crease_ids=[e],
                faulty_vertex_ids_or_point_coordinates=[v],
            )])
        rays.append((bearing(origin, other), e))
    rays.sort()

    if v not in cp.boundary_vertices:
        if not rays:
            return SectorAngles(v, (), (), False)
        bearings = [b for b, _ in rays]
        angles = [bearings[k + 1] - bearings[k] for k in range(len(bearings) - 1)]
        angles.append(bearings[0] + TWO_PI - bearings[-1])
        return SectorAngles(v, tuple(angles), tuple(e for _, e in rays), False)

    # boundary vertex: keep sectors whose midpoint lies inside a face corner
    wedges = face_wedges(cp, v)
    n = len(rays)
    covered = []
    for k in range(n):
        start = rays[k][0]
        sweep = _ccw_gap(start, rays[(k + 1) % n][0]) if n > 1 else TWO_PI
        mid = (start + sweep / 2.0) % TWO_PI
        inside = any(_ccw_gap(ws, mid) < sweep_w for ws, sweep_w in wedges)
        covered.append((inside, sweep))
    # rotate so the list starts right after an uncovered sector
    first = next((k for k in range(n) if not covered[k - 1][0]), 0)
    angles, edges = [], [rays[first][1]]
    for offset in range(n):
        k = (first + offset) % n
        if not covered[k][0]:
            break
        angles.append(covered[k][1])
        edges.append(rays[(k + 1) % n][1])
    return SectorAngles(v, tuple(angles), tuple(edges), True)


def polygon_area(coords: Sequence[Sequence[float]]) -> float:
    """Unsigned area of a simple polygon."""
    if len(coords) < 3:
        return 0.0
    return float(Polygon(coords).area)


def is_ccw(coords: Sequence[Sequence[float]]) -> bool:
    if len(coords) < 3:
        return True
    try:
        return bool(LinearRing(coords).is_ccw)
    except ValueError:
        return True


def orient_ccw(cycle: Sequence[int], coords: Sequence[Sequence[float]]) -> Tuple[int, ...]:
    """Return the vertex cycle in counterclockwise order."""
    points = [coords[i] for i in cycle]
    if is_ccw(points):
        return tuple(cycle)
    return tuple(reversed(cycle))


def as_polygon(coords: Sequence[Sequence[float]]) -> Polygon:
    """Build a polygon, refusing self-intersecting input."""
    poly = Polygon(coords)
    if not poly.is_valid:
        raise ValueError(f"Invalid polygon: {explain_validity(poly)}")
    return poly


def polygon_overlap(a, b) -> float:
    """
    Area of intersection of two simple polygons.

    Touching polygons (shared boundary only) overlap by 0.

    Raises:
        ValueError: if either polygon self-intersects
    """
    pa = a if isinstance(a, Polygon) else as_polygon(a)
    pb = b if isinstance(b, Polygon) else as_polygon(b)
    if not pa.is_valid or not pb.is_valid:
        raise ValueError('Invalid polygon passed to polygon_overlap')
    area = float(pa.intersection(pb).area)
    return area if area > EPS else 0.0


def segment_overlap(s1, s2, tol: float = EPS) -> Optional[Tuple[Point, Point]]:
    """Shared piece of two collinear segments, or None."""
    p0, p1 = np.asarray(s1[0], float), np.asarray(s1[1], float)
    q0, q1 = np.asarray(s2[0], float), np.asarray(s2[1], float)
    d = p1 - p0
    length = float(np.hypot(*d))
    if length < tol:
        return None
    u = d / length
    normal = np.array([-u[1], u[0]])
    if abs(float(normal @ (q0 - p0))) > tol or abs(float(normal @ (q1 - p0))) > tol:
        return None
    t0, t1 = sorted((float(u @ (q0 - p0)), float(u @ (q1 - p0))))
    lo, hi = max(0.0, t0), min(length, t1)
    if hi - lo <= tol:
        return None
    a, b = p0 + lo * u, p0 + hi * u
    return (float(a[0]), float(a[1])), (float(b[0]), float(b[1]))


def segment_overlap_length(s1, s2, tol: float = EPS) -> float:
    """Length of the collinear overlap of two segments (0 if not collinear)."""
    shared = segment_overlap(s1, s2, tol)
    if shared is None:
        return 0.0
    return math.dist(shared[0], shared[1])


def crosses_interior(segment, polygon: Polygon, margin: float = 1e-7) -> bool:
    """True when the segment passes through the polygon's interior."""
    shrunk = polygon.buffer(-margin)
    if shrunk.is_empty:
        return False
    return float(LineString(segment).intersection(shrunk).length) > EPS


def quantize(value: float, step: float = 1e-6) -> float:
    """Snap to a grid; -0.0 normalizes to 0.0."""
    return round(round(value / step) * step, 9) + 0.0
