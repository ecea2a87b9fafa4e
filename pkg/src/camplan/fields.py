"""Placement-field construction.

For one target, the set of camera positions that can fully cover it is cut out
of the plane by four constraint families: range to both endpoints, the maximum
view angle (an inscribed-angle circle pair over the target chord), the facing
cone, and occlusion by other segments.  Regions are built by classifying a
boundary-curve arrangement against the exact membership predicate, which keeps
the two from drifting apart; the one sanctioned exception is an occlusion
sliver thinner than the classification offset, which stays inside the region
(see cpf).  Membership predicates are always the final authority.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .geom import (
    Circle,
    Curve,
    DegenerateError,
    Point,
    Region,
    Segment,
    Tolerance,
    angle_between,
    region_from_curves,
    point_segment_distance,
    segment_blocks_triangle,
)
from .model import Scenario, SensorSpec, Target, facing


@dataclass(frozen=True, slots=True)
class AovCirclePair:
    """The two circles seeing a chord at a fixed inscribed angle.

    c_plus bounds the view-angle limit on the chord's +normal side (its arc on
    that side subtends exactly theta), c_minus on the other side.  For
    theta > pi/2 each circle's center sits on the side opposite its arc.
    """

    chord: Segment
    theta: float
    c_plus: Circle
    c_minus: Circle

    @property
    def circles(self) -> tuple[Circle, Circle]:
        return (self.c_plus, self.c_minus)


def aov_pair(chord: Segment, theta: float) -> AovCirclePair:
    if not 0.0 < theta < math.pi:
        raise ValueError(f"inscribed angle must be in (0, pi), got {theta}")
    length = chord.length()
    if length <= 0.0:
        raise DegenerateError("zero-length chord")
    radius = length / (2.0 * math.sin(theta))
    mx, my = chord.midpoint()
    dx, dy = chord.direction()
    nx, ny = -dy, dx
    off = radius * math.cos(theta)  # signed: flips sides for obtuse theta
    c_plus = Circle((mx + nx * off, my + ny * off), radius)
    c_minus = Circle((mx - nx * off, my - ny * off), radius)
    return AovCirclePair(chord, theta, c_plus, c_minus)


def subtended_angle(t: Target, p: Point) -> float:
    """Angle under which the target chord is seen from p (pi on the chord itself)."""
    u = (t.start[0] - p[0], t.start[1] - p[1])
    v = (t.end[0] - p[0], t.end[1] - p[1])
    if u == (0.0, 0.0) or v == (0.0, 0.0):
        return math.pi
    return angle_between(u, v)


def field_tolerance(t: Target, sensor: SensorSpec) -> Tolerance:
    return Tolerance.for_diameter(2.0 * (sensor.r_max + t.width))


def bcpf_contains(t: Target, sensor: SensorSpec, p: Point, tol: Tolerance | None = None) -> bool:
    """Range + view-angle + facing predicate; the exact membership test for bcpf()."""
    if tol is None:
        tol = field_tolerance(t, sensor)
    if math.dist(p, t.start) > sensor.r_max + tol.eps_len:
        return False
    if math.dist(p, t.end) > sensor.r_max + tol.eps_len:
        return False
    if sensor.r_min > 0.0 and point_segment_distance(p, t.segment) < sensor.r_min - tol.eps_len:
        return False
    theta = sensor.theta
    if theta < math.pi and subtended_angle(t, p) > theta + tol.eps_ang:
        return False
    return facing(t, p, sensor.phi, tol.eps_ang)


def bcpf_boundary_curves(t: Target, sensor: SensorSpec) -> list[Curve]:
    """All curves the region boundary can lie on (superset; classification prunes)."""
    curves: list[Curve] = [Circle(t.start, sensor.r_max), Circle(t.end, sensor.r_max)]
    if sensor.theta < math.pi:
        pair = aov_pair(t.segment, sensor.theta)
        curves.extend(pair.circles)
    m = t.midpoint
    base = math.atan2(t.normal[1], t.normal[0])
    reach = 2.0 * (sensor.r_max + t.width)
    for sign in (1.0, -1.0):
        a = base + sign * sensor.phi
        curves.append(Segment(m, (m[0] + reach * math.cos(a), m[1] + reach * math.sin(a))))
    return curves


def _field_scales(t: Target, sensor: SensorSpec) -> tuple[float, float]:
    d = 2.0 * (sensor.r_max + t.width)
    return 1e-7 * d, 1e-9 * d  # classification offset, vertex snap


def bcpf(t: Target, sensor: SensorSpec) -> Region:
    """Placement region ignoring occlusion.  Exact construction needs r_min = 0."""
    if sensor.r_min > 0.0:
        raise ValueError("region construction supports r_min = 0 only; use bcpf_contains")
    offset, snap = _field_scales(t, sensor)
    tol = field_tolerance(t, sensor)

    def inside(p: Point) -> bool:
        return bcpf_contains(t, sensor, p, tol)

    return region_from_curves(bcpf_boundary_curves(t, sensor), inside, offset=offset, snap=snap, eps=snap)


# --- occlusion -------------------------------------------------------------

def interacting_blockers(t: Target, scenario: Scenario) -> list[tuple[Segment, int]]:
    """Blocking segments close enough to matter for this target's field."""
    m = t.midpoint
    reach = scenario.sensor.r_max + t.width + scenario.tol.eps_len
    out = []
    for seg, owner in scenario.blockers():
        if owner == t.id:
            continue
        if point_segment_distance(m, seg) <= reach:
            out.append((seg, owner))
    return out


def occlusion_excluded(
    t: Target,
    x: Point,
    scenario: Scenario,
    blockers: list[tuple[Segment, int]] | None = None,
) -> bool:
    """Whether any other segment blocks the sight triangle from x to the target."""
    if blockers is None:
        blockers = interacting_blockers(t, scenario)
    eps = scenario.tol.eps_len
    base = t.segment
    for seg, _ in blockers:
        if segment_blocks_triangle(seg, x, base, eps):
            return True
    return False


@dataclass(frozen=True, slots=True)
class OcclusionFan:
    """Boundary geometry of one occluder's shadow: rays from its endpoints
    directed away from the target endpoints, plus the occluder itself."""

    target_id: int
    occluder: Segment
    rays: tuple[Segment, ...]


def occlusion_fan(t: Target, occluder: Segment, reach: float, eps: float) -> OcclusionFan:
    rays = []
    m = t.midpoint
    for q in (occluder.a, occluder.b):
        for e in (t.start, t.end):
            d = math.dist(q, e)
            if d <= eps:
                continue  # shared endpoint never blocks, casts no shadow edge
            length = reach + math.dist(q, m)
            ux, uy = (q[0] - e[0]) / d, (q[1] - e[1]) / d
            rays.append(Segment(q, (q[0] + ux * length, q[1] + uy * length)))
    return OcclusionFan(t.id, occluder, tuple(rays))


def cpf_contains(
    t: Target,
    scenario: Scenario,
    p: Point,
    tol: Tolerance | None = None,
    blockers: list[tuple[Segment, int]] | None = None,
) -> bool:
    if not bcpf_contains(t, scenario.sensor, p, tol):
        return False
    return not occlusion_excluded(t, p, scenario, blockers)


def _probe_fan(t: Target, sensor: SensorSpec) -> list[Point]:
    """Deterministic spot checks across the facing cone at three depths."""
    m = t.midpoint
    nb = math.atan2(t.normal[1], t.normal[0])
    floor = max(sensor.r_min, t.width)
    pts = []
    for i in range(9):
        psi = nb - sensor.phi + (i + 0.5) * (2.0 * sensor.phi / 9.0)
        for frac in (0.2, 0.5, 0.85):
            r = floor + frac * (sensor.r_max - floor)
            pts.append((m[0] + r * math.cos(psi), m[1] + r * math.sin(psi)))
    return pts


def _shadow_sine(t: Target, seg: Segment) -> float:
    """|sin| of the angle between an occluder and its sight line to the target.
    Near zero means the occluder points at the target and casts a needle."""
    m = t.midpoint
    bx = (seg.a[0] + seg.b[0]) / 2.0 - m[0]
    by = (seg.a[1] + seg.b[1]) / 2.0 - m[1]
    L = math.hypot(bx, by)
    if L == 0.0:
        return 0.0
    dx, dy = seg.direction()
    return abs(bx * dy - by * dx) / L


def cpf(t: Target, scenario: Scenario) -> Region:
    """Full placement region: bcpf minus every occluder's shadow.

    Built in one arrangement pass over bcpf curves + occluder segments + shadow
    rays; an empty region is legal and means the target cannot be covered.

    A near-radial occluder casts a needle-shaped shadow thinner than the
    classification offset, which no boundary arrangement can close.  The
    extraction is therefore checked against its own membership predicate on a
    probe fan; on disagreement the most needle-like occluder is dropped and the
    region rebuilt, conservatively keeping such slivers inside the region.
    Exact occlusion everywhere remains the job of cpf_contains.
    """
    sensor = scenario.sensor
    if sensor.r_min > 0.0:
        raise ValueError("region construction supports r_min = 0 only; use cpf_contains")
    offset, snap = _field_scales(t, sensor)
    tol = field_tolerance(t, sensor)
    reach = 2.0 * (sensor.r_max + t.width)
    probes = _probe_fan(t, sensor)
    # fattest shadows last so needles are sacrificed first
    subset = sorted(interacting_blockers(t, scenario),
                    key=lambda item: _shadow_sine(t, item[0]), reverse=True)

    while True:
        curves = bcpf_boundary_curves(t, sensor)
        for seg, _ in subset:
            curves.append(seg)
            curves.extend(occlusion_fan(t, seg, reach, tol.eps_len).rays)

        def inside(p: Point) -> bool:
            return cpf_contains(t, scenario, p, tol, subset)

        region = region_from_curves(curves, inside, offset=offset, snap=snap, eps=snap)
        if not subset or all(region.contains(q) == inside(q) for q in probes):
            return region
        subset.pop()


def frontal_fan(region: Region, origin: Point, normal: Point) -> float:
    """Angular extent of the region's boundary as seen from origin, measured
    as a spread around the normal direction.  Used for sampler budget bounds."""
    base = math.atan2(normal[1], normal[0])
    lo = math.inf
    hi = -math.inf
    for piece in region.pieces():
        if isinstance(piece, Segment):
            samples = [piece.point_at(k / 8.0) for k in range(9)]
        else:
            sw = piece.sweep()
            step = sw / 8.0 if piece.ccw else -sw / 8.0
            samples = [piece.circle.point_at(piece.start + k * step) for k in range(9)]
        for q in samples:
            dx, dy = q[0] - origin[0], q[1] - origin[1]
            if dx == 0.0 and dy == 0.0:
                continue
            rel = math.remainder(math.atan2(dy, dx) - base, math.tau)
            lo = min(lo, rel)
            hi = max(hi, rel)
    if lo > hi:
        return 0.0
    return hi - lo
