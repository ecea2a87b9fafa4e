"""Placement-field tests: circle pairs, bcpf/cpf regions, occlusion."""
import math
import random

import pytest

from camplan.fields import (
    aov_pair,
    bcpf,
    bcpf_contains,
    cpf,
    cpf_contains,
    frontal_fan,
    interacting_blockers,
    occlusion_excluded,
    subtended_angle,
)
from camplan.geom import Arc, Segment
from camplan.model import Obstacle, Scenario, SensorSpec, Target


def scen(targets, sensor, obstacles=(), w=100.0, h=100.0):
    return Scenario(width=w, height=h, sensor=sensor, targets=tuple(targets), obstacles=tuple(obstacles))


UNIT_CHORD = Segment((0.0, 0.0), (1.0, 0.0))


# --- aov_pair ---------------------------------------------------------------

def test_aov_pair_right_angle():
    pair = aov_pair(UNIT_CHORD, math.pi / 2)
    assert pair.c_plus.radius == pytest.approx(0.5)
    assert pair.c_plus.center == pytest.approx((0.5, 0.0), abs=1e-15)
    assert pair.c_minus.center == pytest.approx((0.5, 0.0), abs=1e-15)


def test_aov_pair_acute():
    pair = aov_pair(UNIT_CHORD, math.pi / 3)
    assert pair.c_plus.radius == pytest.approx(1 / math.sqrt(3))
    assert pair.c_plus.center == pytest.approx((0.5, 0.288675), abs=1e-6)
    assert pair.c_minus.center == pytest.approx((0.5, -0.288675), abs=1e-6)


def test_aov_pair_obtuse():
    pair = aov_pair(UNIT_CHORD, 2 * math.pi / 3)
    assert pair.c_plus.radius == pytest.approx(1 / math.sqrt(3))
    # obtuse angle: each circle's center lies opposite its arc
    assert pair.c_plus.center == pytest.approx((0.5, -0.288675), abs=1e-6)
    assert pair.c_minus.center == pytest.approx((0.5, 0.288675), abs=1e-6)


def test_aov_pair_rejects_reflex():
    with pytest.raises(ValueError):
        aov_pair(UNIT_CHORD, math.pi)


def test_aov_pair_inscribed_angle_property():
    t = Target(0, (0.0, 0.0), (1.0, 0.0), (0.0, 1.0))
    for theta in (0.3, math.pi / 2 - 0.1, math.pi / 2, 2.0, 2.8):
        pair = aov_pair(UNIT_CHORD, theta)
        for ang in [k * 0.31 for k in range(21)]:
            for circle, side in ((pair.c_plus, 1.0), (pair.c_minus, -1.0)):
                p = circle.point_at(ang)
                if p[1] * side < 1e-3:  # keep to this circle's own side, off the chord
                    continue
                assert subtended_angle(t, p) == pytest.approx(theta, abs=1e-6)


# --- bcpf -------------------------------------------------------------------

T0 = Target(0, (0.0, 0.0), (1.0, 0.0), (0.0, 1.0))
SENSOR_2 = SensorSpec(aov_deg=100.0, r_min=0.0, r_max=2.0, phi_deg=90.0)


def test_bcpf_piece_count():
    reg = bcpf(T0, SENSOR_2)
    assert len(reg.loops) == 1
    pieces = reg.loops[0]
    assert len(pieces) == 5
    arcs = [p for p in pieces if isinstance(p, Arc)]
    segs = [p for p in pieces if isinstance(p, Segment)]
    assert len(arcs) == 3
    assert len(segs) == 2


def test_bcpf_membership_examples():
    reg = bcpf(T0, SENSOR_2)
    assert reg.contains((0.5, 1.5))
    assert not reg.contains((0.5, -0.5))
    assert not reg.contains((0.5, 0.1))  # chord seen at about 157 deg > 100 deg


def test_bcpf_rejects_positive_r_min():
    with pytest.raises(ValueError):
        bcpf(T0, SensorSpec(aov_deg=100.0, r_min=0.5, r_max=2.0))
    # predicate path still works
    assert not bcpf_contains(T0, SensorSpec(aov_deg=100.0, r_min=0.5, r_max=2.0), (0.5, 0.45))
    assert bcpf_contains(T0, SensorSpec(aov_deg=100.0, r_min=0.5, r_max=2.0), (0.5, 1.0))


def test_bcpf_mirror_symmetry():
    # phi = pi/2: region is symmetric across the chord's perpendicular bisector
    reg = bcpf(T0, SENSOR_2)
    rng = random.Random(7)
    for _ in range(300):
        p = (rng.uniform(-2.5, 3.5), rng.uniform(-1.0, 3.0))
        q = (1.0 - p[0], p[1])
        if reg.boundary_distance(p) < 1e-6 or reg.boundary_distance(q) < 1e-6:
            continue
        assert reg.contains(p) == reg.contains(q)


def test_bcpf_within_reach_disk():
    reg = bcpf(T0, SENSOR_2)
    m = T0.midpoint
    bound = SENSOR_2.r_max + T0.width / 2 + 1e-9
    for v in reg.vertices():
        assert math.dist(v, m) <= bound
    rng = random.Random(3)
    for _ in range(500):
        p = (rng.uniform(-3, 4), rng.uniform(-3, 4))
        if reg.contains(p):
            assert math.dist(p, m) <= bound


def test_bcpf_agrees_with_predicate():
    reg = bcpf(T0, SENSOR_2)
    rng = random.Random(11)
    band = 1e-6
    checked = 0
    for _ in range(4000):
        p = (rng.uniform(-2.5, 3.5), rng.uniform(-2.5, 3.5))
        if reg.boundary_distance(p) <= band:
            continue
        assert reg.contains(p) == bcpf_contains(T0, SENSOR_2, p)
        checked += 1
    assert checked > 3500


# --- occlusion --------------------------------------------------------------

def test_occlusion_examples():
    occ = Obstacle(0, ((0.25, 1.0), (0.75, 1.0)))
    s = scen([T0], SENSOR_2, [occ])
    assert occlusion_excluded(T0, (0.5, 2.0), s)
    assert not occlusion_excluded(T0, (0.5, 0.5), s)


def test_occlusion_shared_endpoint():
    t2 = Target(1, (1.0, 0.0), (2.0, 0.0), (0.0, 1.0))
    s = scen([T0, t2], SENSOR_2)
    assert not occlusion_excluded(T0, (0.5, 1.0), s)


def test_interacting_blockers_filter():
    far = Obstacle(0, ((60.0, 60.0), (61.0, 60.0)))
    near = Obstacle(1, ((0.25, 1.0), (0.75, 1.0)))
    s = scen([T0], SENSOR_2, [far, near])
    segs = interacting_blockers(T0, s)
    assert len(segs) == 1
    assert segs[0][0].a == (0.25, 1.0)


# --- cpf --------------------------------------------------------------------

def test_cpf_isolated_equals_bcpf():
    s = scen([T0], SENSOR_2)
    reg_c = cpf(T0, s)
    reg_b = bcpf(T0, SENSOR_2)
    assert len(reg_c.loops) == len(reg_b.loops)
    assert sum(1 for _ in reg_c.pieces()) == sum(1 for _ in reg_b.pieces())
    rng = random.Random(5)
    for _ in range(300):
        p = (rng.uniform(-2.5, 3.5), rng.uniform(-1.0, 3.0))
        if reg_c.boundary_distance(p) < 1e-6:
            continue
        assert reg_c.contains(p) == reg_b.contains(p)


def test_cpf_occluder_example():
    occ = Obstacle(0, ((0.25, 1.0), (0.75, 1.0)))
    s = scen([T0], SENSOR_2, [occ])
    reg = cpf(T0, s)
    assert not reg.contains((0.5, 1.8))
    assert reg.contains((1.9, 0.5))


def test_cpf_agrees_with_predicate():
    occ = Obstacle(0, ((0.25, 1.0), (0.75, 1.0)))
    s = scen([T0], SENSOR_2, [occ])
    reg = cpf(T0, s)
    rng = random.Random(13)
    band = 1e-6
    disagreements = 0
    checked = 0
    for _ in range(10000):
        p = (rng.uniform(-2.5, 3.5), rng.uniform(-2.5, 3.5))
        if reg.boundary_distance(p) <= band:
            continue
        if reg.contains(p) != cpf_contains(T0, s, p):
            disagreements += 1
        checked += 1
    assert checked > 9000
    assert disagreements == 0


def test_cpf_two_components():
    # wall almost touching the target splits the field; the view-angle lens
    # (top at ~0.42 over the chord) seals the gap under the wall's lower end
    t = Target(0, (10.0, 10.0), (11.0, 10.0), (0.0, 1.0))
    wall = Obstacle(0, ((10.5, 10.05), (10.5, 35.0)))
    s = scen([t], SENSOR_2, [wall], w=40.0, h=40.0)
    reg = cpf(t, s)
    assert len(reg.loops) == 2
    assert reg.contains((9.5, 10.1))      # left sliver: sight to far end passes under wall
    assert reg.contains((11.5, 10.1))     # right sliver, mirrored
    assert not reg.contains((9.5, 10.3))  # sight line to far end hits the wall
    assert not reg.contains((10.5, 11.0))  # straight ahead: wall in the way


def test_frontal_fan_half_plane_case():
    t = Target(0, (0.0, 0.0), (1.0, 0.0), (0.0, 1.0))
    sensor = SensorSpec(aov_deg=100.0, r_min=0.0, r_max=20.0, phi_deg=90.0)
    reg = bcpf(t, sensor)
    fan = frontal_fan(reg, t.midpoint, t.normal)
    assert 3.0 < fan <= math.pi + 1e-9


def test_cpf_survives_radial_occluder():
    # occluder pointing straight at the target casts a needle shadow thinner
    # than the classification offset; the region must keep its main loop and
    # may conservatively retain the needle
    t = Target(0, (0.0, 0.0), (1.0, 0.0), (0.0, 1.0))
    d = math.hypot(0.03, 1.0)
    dirv = (0.03 / d, 1.0 / d)
    nrm = (-dirv[1], dirv[0])
    blk = Target(1, (0.52, 2.0), (0.52 + dirv[0], 2.0 + dirv[1]), nrm)
    sensor = SensorSpec(aov_deg=100.0, r_min=0.0, r_max=20.0, phi_deg=90.0)
    s = scen([t, blk], sensor, w=60.0, h=60.0)

    reg = cpf(t, s)
    assert len(reg.loops) >= 1
    blockers = interacting_blockers(t, s)
    rng = random.Random(4)
    checked = 0
    for _ in range(400):
        p = (rng.uniform(-21.0, 22.0), rng.uniform(0.0, 21.0))
        if cpf_contains(t, s, p, blockers=blockers):
            assert reg.contains(p)
            checked += 1
    assert checked > 100


def test_cpf_radial_occluder_keeps_fat_shadows_exact():
    # one needle occluder plus one broadside wall: dropping the needle from the
    # region must not lose the wall's real shadow
    t = Target(0, (0.0, 0.0), (1.0, 0.0), (0.0, 1.0))
    d = math.hypot(0.03, 1.0)
    dirv = (0.03 / d, 1.0 / d)
    blk = Target(1, (0.52, 2.0), (0.52 + dirv[0], 2.0 + dirv[1]), (-dirv[1], dirv[0]))
    wall = Obstacle(0, ((-3.0, 4.0), (3.5, 4.0)))
    sensor = SensorSpec(aov_deg=100.0, r_min=0.0, r_max=20.0, phi_deg=90.0)
    s = scen([t, blk], sensor, [wall], w=60.0, h=60.0)

    reg = cpf(t, s)
    # deep behind the wall: excluded both by predicate and by the region
    p = (0.5, 12.0)
    assert not cpf_contains(t, s, p)
    assert not reg.contains(p)
    # in front of the wall and clear of the needle: covered
    q = (1.8, 2.5)
    assert cpf_contains(t, s, q)
    assert reg.contains(q)
