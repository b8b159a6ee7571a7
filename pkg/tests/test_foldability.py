import math

import numpy as np
import pytest

from src.core.diagnostics import CapacityError
from src.core.foldability import (
    ORACLE_CAP,
    blb_violations,
    check_big_little_big,
    check_flat_foldable_all,
    check_kawasaki,
    check_maekawa,
    crimp_reduces,
    enumerate_mv_assignments,
    kawasaki_everywhere,
    kawasaki_holds,
    maekawa_everywhere,
    maekawa_holds,
    valid_mv_assignments,
)
from tests.conftest import GOLDEN, half_fold, plus_cp, sheet_cp


def _deg(*angles):
    return [math.radians(a) for a in angles]


def _centre(cp):
    return next(v for v, xy in enumerate(cp.vertices_coords)
                if abs(xy[0] - 0.5) < 1e-9 and abs(xy[1] - 0.5) < 1e-9)


@pytest.mark.parametrize('labels, ok', [
    ('MMMV', True),
    ('VVVM', True),
    ('MMVV', False),
    ('MMMM', False),
    ('', False),
])
def test_maekawa(labels, ok):
    assert maekawa_holds(labels) is ok


@pytest.mark.parametrize('angles, ok', [
    ((90, 90, 90, 90), True),
    ((100, 80, 80, 100), True),
    ((90, 90, 100, 80), False),
    ((120, 120, 120), False),
])
def test_kawasaki(angles, ok):
    assert kawasaki_holds(_deg(*angles)) is ok


def test_big_little_big_flags_equal_labels_around_small_sector():
    angles = _deg(100, 70, 80, 110)
    assert blb_violations(angles, 'VMMM') == [1]
    assert not crimp_reduces(angles, 'VMMM')
    assert blb_violations(angles, 'MMVM') == []
    assert crimp_reduces(angles, 'MMVM')


def test_unassigned_neighbours_are_not_judged():
    assert blb_violations(_deg(100, 70, 80, 110), 'VMUM') == []


def test_generic_degree_four_has_four_assignments():
    labelings = valid_mv_assignments(_deg(100, 70, 80, 110))
    assert len(labelings) == 4
    assert all(labels[1] != labels[2] for labels in labelings)


def test_square_twist_vertex_has_eight_assignments():
    assert enumerate_mv_assignments(_deg(90, 90, 90, 90)) == 8


def test_non_kawasaki_vertex_has_none():
    assert enumerate_mv_assignments(_deg(90, 90, 100, 80)) == 0


def test_oracle_refuses_large_vertices():
    angles = [2 * math.pi / (ORACLE_CAP + 2)] * (ORACLE_CAP + 2)
    with pytest.raises(CapacityError):
        valid_mv_assignments(angles)


def test_plus_vertex_reports(maekawa_broken):
    v = _centre(maekawa_broken)
    report = check_maekawa(maekawa_broken, v)
    assert (report.mountain, report.valley) == (4, 0)
    assert not report.maekawa_ok
    assert report.reason == 'maekawa'
    assert report.diagnostic.code == 'E_GEOM_ANGLE_CONSTRAINT_VIOLATION'
    assert report.diagnostic.params['reason'] == 'maekawa'
    assert report.diagnostic.params['vertex'] == v
    assert check_kawasaki(maekawa_broken, v).kawasaki_ok
    assert check_kawasaki(maekawa_broken, v).diagnostic is None


def test_kawasaki_report(kawasaki_broken):
    report = check_kawasaki(kawasaki_broken, _centre(kawasaki_broken))
    assert report.reason == 'kawasaki'
    assert report.diagnostic.params['reason'] == 'kawasaki'
    assert len(report.diagnostic.params['faulty_crease_ids']) == 4
    assert sorted(report.alternating_sums) == pytest.approx(
        sorted(_deg(200, 160)), abs=1e-3)


def test_boundary_vertices_are_exempt():
    cp = half_fold('V')
    bottom = next(v for v, xy in enumerate(cp.vertices_coords) if xy == (0.5, 0.0))
    assert not check_maekawa(cp, bottom).applicable
    assert not check_kawasaki(cp, bottom).applicable
    assert check_big_little_big(cp, bottom)


@pytest.mark.parametrize('name', sorted(GOLDEN))
def test_golden_patterns_pass_local_laws(name):
    assert check_flat_foldable_all(GOLDEN[name]) == []


def test_maekawa_failure_diagnostic(maekawa_broken):
    (d,) = check_flat_foldable_all(maekawa_broken)
    assert d.code == 'E_GEOM_ANGLE_CONSTRAINT_VIOLATION'
    assert d.params['reason'] == 'maekawa'
    assert d.params['vertex'] == _centre(maekawa_broken)
    assert d.params['angles'] == [90.0, 90.0, 90.0, 90.0]


def test_kawasaki_failure_diagnostic(kawasaki_broken):
    (d,) = check_flat_foldable_all(kawasaki_broken)
    assert d.params['reason'] == 'kawasaki'
    assert len(d.params['faulty_crease_ids']) == 4


def test_odd_degree_vertex():
    c = (0.5, 0.5)
    cp = sheet_cp([(c, (1.0, 0.5), 'M'), (c, (0.5, 1.0), 'V'), (c, (0.0, 0.5), 'M')])
    (d,) = check_flat_foldable_all(cp)
    assert d.params['reason'] == 'odd-degree'

    report = check_kawasaki(cp, _centre(cp))
    assert not report.kawasaki_ok
    assert report.reason == 'odd-degree'
    assert report.diagnostic.code == 'E_GEOM_ANGLE_CONSTRAINT_VIOLATION'
    assert sorted(report.diagnostic.params['angles']) == [90.0, 90.0, 180.0]
    assert report.diagnostic.params == d.params


def test_everywhere_helpers(maekawa_broken, kawasaki_broken):
    assert kawasaki_everywhere(maekawa_broken)
    assert not maekawa_everywhere(maekawa_broken)
    assert not kawasaki_everywhere(kawasaki_broken)
    assert maekawa_everywhere(kawasaki_broken)
    assert not maekawa_everywhere(plus_cp('U', 'M', 'M', 'V'))


def _random_vertex(rng, kawasaki):
    """Sector angles around a vertex of degree 4, 6 or 8."""
    n = int(rng.choice([4, 6, 8]))
    if not kawasaki:
        return list(rng.dirichlet(np.ones(n)) * 2 * math.pi)
    odd = rng.dirichlet(np.ones(n // 2)) * math.pi
    even = rng.dirichlet(np.ones(n // 2)) * math.pi
    return [a for pair in zip(odd, even) for a in pair]


@pytest.mark.parametrize('seed', range(5))
def test_oracle_agrees_with_local_laws(seed):
    rng = np.random.default_rng(seed)
    for k in range(100):
        angles = _random_vertex(rng, kawasaki=k % 2 == 0)
        labelings = valid_mv_assignments(angles)
        assert bool(labelings) == kawasaki_holds(angles), angles
        for labels in labelings:
            assert maekawa_holds(labels)
            assert blb_violations(angles, labels) == []
