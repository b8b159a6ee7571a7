"""
Foldability module - local flat-foldability laws around single vertices.

Maekawa (|M - V| = 2), Kawasaki (alternating sector sums equal π) and
big-little-big, plus an exhaustive single-vertex oracle built on crimp
reduction. Global layer ordering lives in the folder module.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

from src.core.cp_model import CreasePattern
from src.core.diagnostics import CapacityError, Diagnostic, make_diagnostic
from src.core.geometry import ANGLE_EPS, TWO_PI, SectorAngles, face_wedges, sector_angles

logger = logging.getLogger(__name__)

# Assignments that participate in folding at a vertex
FOLD_KINDS = ('M', 'V', 'U')
ORACLE_CAP = 16


@dataclass(frozen=True)
class VertexFoldReport:
    """Local law results at one vertex."""
    vertex: int
    mountain: int = 0
    valley: int = 0
    maekawa_ok: bool = True
    kawasaki_ok: bool = True
    blb_ok: bool = True
    alternating_sums: Tuple[float, float] = (math.pi, math.pi)
    # False at boundary vertices, where the laws are not checked
    applicable: bool = True
    reason: Optional[str] = None
    # E_GEOM_ANGLE_CONSTRAINT_VIOLATION explaining a failed law
    diagnostic: Optional[Diagnostic] = field(default=None, compare=False)


def crease_sectors(cp: CreasePattern, v: int) -> Tuple[SectorAngles, Tuple[str, ...]]:
    """Sector angles between fold creases at v, with the crease labels."""
    sectors = sector_angles(cp, v, include=FOLD_KINDS)
    labels = tuple(cp.effective_assignments[e] for e in sectors.edges)
    return sectors, labels


# ---------------------------------------------------------------------------
# Pure per-vertex rules
# ---------------------------------------------------------------------------

def maekawa_holds(labels: Sequence[str]) -> bool:
    m = sum(1 for a in labels if a == 'M')
    v = sum(1 for a in labels if a == 'V')
    return abs(m - v) == 2


def alternating_sums(angles: Sequence[float]) -> Tuple[float, float]:
    return float(sum(angles[0::2])), float(sum(angles[1::2]))


def kawasaki_holds(angles: Sequence[float]) -> bool:
    if len(angles) % 2:
        return False
    if not angles:
        return True
    odd, even = alternating_sums(angles)
    return abs(odd - math.pi) <= ANGLE_EPS and abs(even - math.pi) <= ANGLE_EPS


def blb_violations(angles: Sequence[float], labels: Sequence[str]) -> List[int]:
    """
    Sectors that are strict local minima bounded by equal assignments.

    Sector i lies between crease i and crease i + 1. Sectors touching an
    unassigned crease are not judged.
    """
    n = len(angles)
    bad = []
    if n < 2:
        return bad
    for i in range(n):
        left, right = angles[i - 1], angles[(i + 1) % n]
        if angles[i] < left - ANGLE_EPS and angles[i] < right - ANGLE_EPS:
            a, b = labels[i], labels[(i + 1) % n]
            if 'U' in (a, b):
                continue
            if a == b:
                bad.append(i)
    return bad


def crimp_reduces(angles: Sequence[float], labels: Sequence[str]) -> bool:
    """
    Decide single-vertex flat-foldability of a labeled vertex.

    Repeatedly crimps a sector no larger than its neighbours whose two
    creases have opposite assignments; the last two sectors must be equal
    with equal assignments.
    """
    a = list(angles)
    lab = list(labels)
    if len(a) % 2:
        return False
    if not a:
        return True
    while len(a) > 2:
        n = len(a)
        for i in range(n):
            if (a[i] <= a[i - 1] + ANGLE_EPS and a[i] <= a[(i + 1) % n] + ANGLE_EPS
                    and lab[i] != lab[(i + 1) % n]):
                break
        else:
            return False
        # rotate so the crimped sector sits at position 1
        k = (i - 1) % n
        a = a[k:] + a[:k]
        lab = lab[k:] + lab[:k]
        a = [a[0] - a[1] + a[2]] + a[3:]
        lab = [lab[0]] + lab[3:]
    return abs(a[0] - a[1]) <= ANGLE_EPS and lab[0] == lab[1]


def _angles_of(angles: Union[SectorAngles, Sequence[float]]) -> Tuple[float, ...]:
    if isinstance(angles, SectorAngles):
        return angles.angles
    return tuple(float(x) for x in angles)


def valid_mv_assignments(angles: Union[SectorAngles, Sequence[float]]) -> List[Tuple[str, ...]]:
    """
    Every M/V labeling of the creases that folds flat.

    Raises:
        CapacityError: above ORACLE_CAP creases
    """
    values = _angles_of(angles)
    n = len(values)
    if n > ORACLE_CAP:
        raise CapacityError(f"{n} creases exceeds the oracle cap of {ORACLE_CAP}")
    return [
        labels for labels in itertools.product('MV', repeat=n)
        if maekawa_holds(labels) and crimp_reduces(values, labels)
    ]


def enumerate_mv_assignments(angles: Union[SectorAngles, Sequence[float]]) -> int:
    """Count of valid flat-foldable M/V labelings (exhaustive)."""
    return len(valid_mv_assignments(angles))


# ---------------------------------------------------------------------------
# Checks against a crease pattern
# ---------------------------------------------------------------------------

def angle_violation(cp: CreasePattern, v: int, reason: str) -> Diagnostic:
    """E_GEOM_ANGLE_CONSTRAINT_VIOLATION at v with its sector angles in degrees."""
    sectors, _ = crease_sectors(cp, v)
    degrees = [round(d, 6) for d in sectors.degrees()]
    return make_diagnostic(
        'E_GEOM_ANGLE_CONSTRAINT_VIOLATION',
        vertex=v,
        reason=reason,
        faulty_crease_ids=list(sectors.edges),
        faulty_vertex_ids_or_point_coordinates=list(cp.vertices_coords[v]),
        angles=degrees,
        conflicting_crease_ids_and_angles=[
            [e, deg] for e, deg in zip(sectors.edges, degrees)
        ],
    )


def check_maekawa(cp: CreasePattern, v: int) -> VertexFoldReport:
    if v in cp.boundary_vertices:
        return VertexFoldReport(vertex=v, applicable=False)
    labels = [cp.effective_assignments[e] for e in cp.vertex_edges[v]]
    m = labels.count('M')
    val = labels.count('V')
    ok = abs(m - val) == 2 if (m or val) else True
    if ok:
        return VertexFoldReport(vertex=v, mountain=m, valley=val)
    return VertexFoldReport(vertex=v, mountain=m, valley=val, maekawa_ok=False,
                            reason='maekawa', diagnostic=angle_violation(cp, v, 'maekawa'))


def check_kawasaki(cp: CreasePattern, v: int) -> VertexFoldReport:
    if v in cp.boundary_vertices:
        return VertexFoldReport(vertex=v, applicable=False)
    sectors, _ = crease_sectors(cp, v)
    if not sectors.angles:
        return VertexFoldReport(vertex=v)
    sums = alternating_sums(sectors.angles)
    if len(sectors.angles) % 2:
        reason = 'odd-degree'
    elif not kawasaki_holds(sectors.angles):
        reason = 'kawasaki'
    else:
        return VertexFoldReport(vertex=v, alternating_sums=sums)
    return VertexFoldReport(vertex=v, kawasaki_ok=False, alternating_sums=sums,
                            reason=reason, diagnostic=angle_violation(cp, v, reason))


def check_big_little_big(cp: CreasePattern, v: int) -> bool:
    if v in cp.boundary_vertices:
        return True
    sectors, labels = crease_sectors(cp, v)
    bad = blb_violations(sectors.angles, labels)
    if bad:
        logger.debug('Vertex %d violates big-little-big at sector(s) %s', v, bad)
    return not bad


def _corner_sum(cp: CreasePattern, v: int) -> float:
    return sum(sweep for _, sweep in face_wedges(cp, v))


def vertex_failure(cp: CreasePattern, v: int) -> Optional[str]:
    """First failing local law at an interior vertex, or None."""
    sectors, labels = crease_sectors(cp, v)
    if not sectors.angles:
        return None
    if len(sectors.angles) % 2:
        return 'odd-degree'
    if abs(_corner_sum(cp, v) - TWO_PI) > ANGLE_EPS:
        return 'angle-sum'
    assigned = 'U' not in labels
    if assigned and not maekawa_holds(labels):
        return 'maekawa'
    if not kawasaki_holds(sectors.angles):
        return 'kawasaki'
    if assigned and blb_violations(sectors.angles, labels):
        return 'blb'
    return None


def check_flat_foldable_all(cp: CreasePattern) -> List[Diagnostic]:
    """
    One E_GEOM_ANGLE_CONSTRAINT_VIOLATION per interior vertex breaking a
    local law. Reasons are tried in the order odd-degree, angle-sum,
    maekawa, kawasaki, blb.
    """
    diags: List[Diagnostic] = []
    for v in cp.interior_vertices():
        reason = vertex_failure(cp, v)
        if reason is None:
            continue
        diags.append(angle_violation(cp, v, reason))
    if diags:
        logger.debug('%d vertex/vertices fail local flat-foldability', len(diags))
    return diags


def kawasaki_everywhere(cp: CreasePattern) -> bool:
    """Kawasaki (with even degree) at every interior vertex that has creases."""
    for v in cp.interior_vertices():
        sectors, _ = crease_sectors(cp, v)
        if sectors.angles and not kawasaki_holds(sectors.angles):
            return False
    return True


def maekawa_everywhere(cp: CreasePattern) -> bool:
    """Maekawa at every interior vertex that has creases; U creases count as failures."""
    for v in cp.interior_vertices():
        _, labels = crease_sectors(cp, v)
        if labels and not maekawa_holds(labels):
            return False
    return True
