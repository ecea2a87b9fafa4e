"""Angular sweep around candidate points.

Given a candidate position, find which targets it could cover, enumerate every
maximal subset that fits in one view cone, and derive the feasible
viewing-direction window per subset.  Also hosts the independent full-coverage
verifier (`is_fully_covered`) used to check final solutions; the verifier is
scalar, works from first principles, and never consults placement regions.
"""
from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .geom import Point, bearing, norm_angle, point_segment_distance, segment_blocks_triangle, wrap_pi
from .model import CameraPlacement, CandidateConfig, Scenario, Target, facing
from .fields import occlusion_excluded, subtended_angle

TWO_PI = 2.0 * math.pi


# --- scalar predicates ------------------------------------------------------

def coverable(x: Point, t: Target, s: Scenario, blockers=None) -> bool:
    """Whether some viewing direction at x would fully cover t."""
    tol = s.tol
    sensor = s.sensor
    d_s = math.dist(x, t.start)
    d_e = math.dist(x, t.end)
    if d_s <= tol.eps_len or d_e <= tol.eps_len:
        return False
    if max(d_s, d_e) > sensor.r_max + tol.eps_len:
        return False
    if sensor.r_min > 0.0 and point_segment_distance(x, t.segment) < sensor.r_min - tol.eps_len:
        return False
    if sensor.theta < math.pi and subtended_angle(t, x) > sensor.theta + tol.eps_ang:
        return False
    if not facing(t, x, sensor.phi, tol.eps_ang):
        return False
    return not occlusion_excluded(t, x, s, blockers)


def target_interval(x: Point, t: Target) -> tuple[float, float]:
    """Bearings from x to the target endpoints, ordered so the ccw sweep
    lo -> hi has width < pi."""
    b1 = bearing(x, t.start)
    b2 = bearing(x, t.end)
    if wrap_pi(b2 - b1) >= 0.0:
        return b1, b2
    return b2, b1


def is_fully_covered(t: Target, cam: CameraPlacement, s: Scenario) -> bool:
    """The solution verifier: coverable at cam.position and the whole target
    inside the view cone [vd - theta/2, vd + theta/2] (inclusive)."""
    if not coverable(cam.position, t, s):
        return False
    theta = s.sensor.theta
    eps = s.tol.eps_ang
    cone_lo = cam.vd - theta / 2.0
    for endpoint in (t.start, t.end):
        off = norm_angle(bearing(cam.position, endpoint) - cone_lo)
        if off > theta + eps and off < TWO_PI - eps:
            return False
    return True


def deviation(x: Point, alpha: float, t: Target) -> float:
    """Angle between the viewing direction and the line of sight to the target midpoint."""
    return abs(wrap_pi(bearing(x, t.midpoint) - alpha))


def total_deviation(x: Point, alpha: float, targets) -> float:
    return sum(deviation(x, alpha, t) for t in targets)


# --- viewing-direction optimization ----------------------------------------

def optimal_vd(mid_bearings, vd_lo: float, vd_window: float, mode: str = "f1") -> float:
    """Deviation-minimizing direction within [vd_lo, vd_lo + vd_window].

    f1: circular median of the midpoint bearings (even count: midpoint of the
    median pair), clamped to the window.  finf: circular midpoint of the two
    extreme bearings, clamped.
    """
    center = vd_lo + vd_window / 2.0
    if len(mid_bearings) == 0:
        return norm_angle(center)
    rel = sorted(wrap_pi(b - center) for b in mid_bearings)
    k = len(rel)
    if mode == "f1":
        best = rel[k // 2] if k % 2 else (rel[k // 2 - 1] + rel[k // 2]) / 2.0
    elif mode == "finf":
        best = (rel[0] + rel[-1]) / 2.0
    else:
        raise ValueError(f"unknown vd optimization mode {mode!r}")
    half = vd_window / 2.0
    best = min(max(best, -half), half)
    return norm_angle(center + best)


def subset_window(cfg: CandidateConfig, ids, theta: float) -> tuple[float, float]:
    """Feasible vd window when only `ids` (a subset of cfg.covered) must stay covered."""
    wanted = set(ids)
    rel_lo = []
    rel_hi = []
    for tid, lo, hi in zip(cfg.covered, cfg.interval_lo, cfg.interval_hi):
        if tid not in wanted:
            continue
        # all covered intervals sit within theta of vd_rep, so this is linear
        r = wrap_pi(lo - cfg.vd_rep)
        rel_lo.append(r)
        rel_hi.append(r + norm_angle(hi - lo))
    if not rel_lo:
        return cfg.vd_lo, cfg.vd_window
    w_lo = max(rel_hi) - theta / 2.0
    w_hi = min(rel_lo) + theta / 2.0
    return norm_angle(cfg.vd_rep + w_lo), max(w_hi - w_lo, 0.0)


def optimize_vd(x: Point, cfg: CandidateConfig, mode: str = "f1") -> float:
    """Optimized direction for cfg; every covered target stays inside the view
    cone because the result is clamped to the feasible window."""
    if mode == "none":
        return cfg.vd_rep
    return optimal_vd(cfg.mid_bearings, cfg.vd_lo, cfg.vd_window, mode)


def f1_at(cfg: CandidateConfig, alpha: float, subset=None) -> float:
    """Total midpoint deviation of cfg's targets (or a subset) at direction alpha."""
    total = 0.0
    for tid, b in zip(cfg.covered, cfg.mid_bearings):
        if subset is not None and tid not in subset:
            continue
        total += abs(wrap_pi(b - alpha))
    return total


# --- vectorized batch sweep --------------------------------------------------

class ScenarioIndex:
    """Flat numpy snapshot of a scenario for the batch sweep."""

    def __init__(self, s: Scenario):
        self.scenario = s
        ts = s.targets
        self.ids = np.array([t.id for t in ts], dtype=np.int64)
        self.sx = np.array([t.start[0] for t in ts])
        self.sy = np.array([t.start[1] for t in ts])
        self.ex = np.array([t.end[0] for t in ts])
        self.ey = np.array([t.end[1] for t in ts])
        self.nx = np.array([t.normal[0] for t in ts])
        self.ny = np.array([t.normal[1] for t in ts])
        self.mx = (self.sx + self.ex) / 2.0
        self.my = (self.sy + self.ey) / 2.0
        blockers = s.blockers()
        self.bsegs = [b for b, _ in blockers]
        self.bax = np.array([b.a[0] for b, _ in blockers])
        self.bay = np.array([b.a[1] for b, _ in blockers])
        self.bbx = np.array([b.b[0] for b, _ in blockers])
        self.bby = np.array([b.b[1] for b, _ in blockers])
        self.owner = np.array([o for _, o in blockers], dtype=np.int64)
        self.bx_lo = np.minimum(self.bax, self.bbx)
        self.bx_hi = np.maximum(self.bax, self.bbx)
        self.by_lo = np.minimum(self.bay, self.bby)
        self.by_hi = np.maximum(self.bay, self.bby)
        self.tol = s.tol
        self.by_id = {t.id: t for t in ts}
        self.tsegs = [t.segment for t in ts]
        # plain-float copies for the scalar per-point path
        self.ids_l = self.ids.tolist()
        self.sx_l, self.sy_l = self.sx.tolist(), self.sy.tolist()
        self.ex_l, self.ey_l = self.ex.tolist(), self.ey.tolist()
        self.mx_l, self.my_l = self.mx.tolist(), self.my.tolist()
        self.bx_lo_l, self.bx_hi_l = self.bx_lo.tolist(), self.bx_hi.tolist()
        self.by_lo_l, self.by_hi_l = self.by_lo.tolist(), self.by_hi.tolist()
        # blockers close enough to a target's sight disk to ever matter
        r = s.sensor.r_max
        self.near_blockers: list[list[int]] = []
        for j, t in enumerate(ts):
            if self.owner.size:
                d = _seg_point_dist_np(self.mx[j], self.my[j],
                                       self.bax, self.bay, self.bbx, self.bby)
                near = (d <= r + t.width + 1.0) & (self.owner != t.id)
                self.near_blockers.append(np.flatnonzero(near).tolist())
            else:
                self.near_blockers.append([])

    @property
    def n(self) -> int:
        return self.ids.size


def _seg_point_dist_np(px, py, ax, ay, bx, by):
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    t = np.where(L2 > 0.0, ((px - ax) * dx + (py - ay) * dy) / np.where(L2 > 0, L2, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    return np.hypot(px - (ax + t * dx), py - (ay + t * dy))


def _coverable_mask(pts: np.ndarray, idx: ScenarioIndex) -> np.ndarray:
    """(C, n) mask of the range/angle/facing clauses (occlusion handled separately)."""
    s = idx.scenario.sensor
    eps_len = idx.tol.eps_len
    eps_ang = idx.tol.eps_ang
    px = pts[:, 0:1]
    py = pts[:, 1:2]
    vsx = idx.sx[None, :] - px
    vsy = idx.sy[None, :] - py
    vex = idx.ex[None, :] - px
    vey = idx.ey[None, :] - py
    d_s = np.hypot(vsx, vsy)
    d_e = np.hypot(vex, vey)
    ok = (d_s > eps_len) & (d_e > eps_len)
    ok &= np.maximum(d_s, d_e) <= s.r_max + eps_len
    if s.r_min > 0.0:
        seg_d = _seg_point_dist_np(px, py, idx.sx[None, :], idx.sy[None, :], idx.ex[None, :], idx.ey[None, :])
        ok &= seg_d >= s.r_min - eps_len
    if s.theta < math.pi:
        cross = np.abs(vsx * vey - vsy * vex)
        dot = vsx * vex + vsy * vey
        ok &= np.arctan2(cross, dot) <= s.theta + eps_ang
    vmx = px - idx.mx[None, :]
    vmy = py - idx.my[None, :]
    fcross = np.abs(idx.nx[None, :] * vmy - idx.ny[None, :] * vmx)
    fdot = idx.nx[None, :] * vmx + idx.ny[None, :] * vmy
    ok &= np.arctan2(fcross, fdot) <= s.phi + eps_ang
    ok &= np.hypot(vmx, vmy) > eps_len
    return ok


def _occluded_mask(x: Point, tsel: np.ndarray, idx: ScenarioIndex) -> np.ndarray:
    """(k,) mask over targets tsel: some blocker enters the open sight triangle."""
    k = tsel.size
    out = np.zeros(k, dtype=bool)
    if k == 0 or idx.owner.size == 0:
        return out
    eps = idx.tol.eps_len
    sx, sy = idx.sx[tsel], idx.sy[tsel]
    ex, ey = idx.ex[tsel], idx.ey[tsel]
    # bounding-box prefilter: only (target, blocker) pairs whose sight triangle
    # and blocker boxes overlap need the exact clip
    tx_lo = np.minimum(np.minimum(sx, ex), x[0]) - eps
    tx_hi = np.maximum(np.maximum(sx, ex), x[0]) + eps
    ty_lo = np.minimum(np.minimum(sy, ey), x[1]) - eps
    ty_hi = np.maximum(np.maximum(sy, ey), x[1]) + eps
    bx_lo, bx_hi = idx.bx_lo, idx.bx_hi
    by_lo, by_hi = idx.by_lo, idx.by_hi
    cand = (
        (tx_lo[:, None] <= bx_hi[None, :]) & (bx_lo[None, :] <= tx_hi[:, None])
        & (ty_lo[:, None] <= by_hi[None, :]) & (by_lo[None, :] <= ty_hi[:, None])
        & (idx.owner[None, :] != idx.ids[tsel][:, None])
    )
    ti, bi = np.nonzero(cand)
    if ti.size == 0:
        return out

    # winding sign of (apex, start, end); degenerate slivers never block
    cross = (sx - x[0]) * (ey - x[1]) - (sy - x[1]) * (ex - x[0])
    sgn = np.sign(cross)[ti]
    live = sgn != 0.0
    ti, bi, sgn = ti[live], bi[live], sgn[live]
    if ti.size == 0:
        return out

    bax, bay = idx.bax[bi], idx.bay[bi]
    bdx, bdy = idx.bbx[bi] - bax, idx.bby[bi] - bay
    vx = (np.full(ti.size, x[0]), sx[ti], ex[ti])
    vy = (np.full(ti.size, x[1]), sy[ti], ey[ti])

    lo = np.zeros(ti.size)
    hi = np.ones(ti.size)
    empty = np.zeros(ti.size, dtype=bool)
    planes = []
    for i in range(3):
        ux, uy = vx[i], vy[i]
        nx = sgn * (uy - vy[(i + 1) % 3])
        ny = sgn * (vx[(i + 1) % 3] - ux)
        nlen = np.hypot(nx, ny)
        planes.append((ux, uy, nx, ny, nlen))
        dp = nx * (bax - ux) + ny * (bay - uy)
        dq = dp + nx * bdx + ny * bdy
        empty |= (dp < 0.0) & (dq < 0.0)
        den = dp - dq
        cross_at = dp / np.where(den != 0.0, den, 1.0)
        lo = np.where((dp < 0.0) & (dq >= 0.0), np.maximum(lo, cross_at), lo)
        hi = np.where((dq < 0.0) & (dp >= 0.0), np.minimum(hi, cross_at), hi)

    blocked = ~empty & (hi - lo > 1e-12)
    sm = (lo + hi) / 2.0
    mxp = bax + sm * bdx
    myp = bay + sm * bdy
    for ux, uy, nx, ny, nlen in planes:
        blocked &= nx * (mxp - ux) + ny * (myp - uy) > eps * nlen
    out[ti[blocked]] = True
    return out


def _configs_at(x: Point, tsel: np.ndarray, idx: ScenarioIndex, source: int) -> list[CandidateConfig]:
    """Enumerate maximal co-coverable subsets of the coverable targets tsel at x."""
    if tsel.size == 0:
        return []
    theta = idx.scenario.sensor.theta
    eps_ang = idx.tol.eps_ang
    b1 = np.arctan2(idx.sy[tsel] - x[1], idx.sx[tsel] - x[0])
    b2 = np.arctan2(idx.ey[tsel] - x[1], idx.ex[tsel] - x[0])
    diff = np.remainder(b2 - b1 + math.pi, TWO_PI) - math.pi
    lo = np.where(diff >= 0.0, b1, b2) % TWO_PI
    width = np.abs(diff)
    mids = np.arctan2(idx.my[tsel] - x[1], idx.mx[tsel] - x[0]) % TWO_PI

    rel = np.remainder(lo[None, :] - lo[:, None], TWO_PI)
    fits = rel + width[None, :] <= theta + eps_ang
    # dedupe identical rows (first anchor wins), then drop rows strictly
    # contained in another row
    first = {}
    for a, row in enumerate(fits):
        first.setdefault(row.tobytes(), a)
    anchors = np.fromiter(first.values(), dtype=np.int64)
    rows = fits[anchors]
    contained = (rows[:, None, :] <= rows[None, :, :]).all(axis=2)
    np.fill_diagonal(contained, False)
    maximal = ~contained.any(axis=1)

    configs = []
    ids = idx.ids[tsel]
    pos = (float(x[0]), float(x[1]))
    for row, anchor in zip(rows[maximal], anchors[maximal]):
        members = np.flatnonzero(row)
        if members.size == 0:
            continue
        span = (rel[anchor, members] + width[members]).max()
        vd_window = theta - span
        vd_lo = norm_angle(lo[anchor] + span - theta / 2.0)
        vd_rep = norm_angle(lo[anchor] + span / 2.0)
        # re-verify angular containment at vd_rep (range/facing already hold)
        cone_lo = lo[anchor] + span / 2.0 - theta / 2.0
        off = np.remainder(lo[members] - cone_lo, TWO_PI)
        off = np.where(off > TWO_PI - eps_ang, 0.0, off)
        if not np.all(off + width[members] <= theta + eps_ang):
            continue
        members = members[np.argsort(ids[members])]
        mid_arr = mids[members]
        dev = np.abs(np.remainder(mid_arr - vd_rep + math.pi, TWO_PI) - math.pi).sum()
        cfg = CandidateConfig(
            source=source,
            position=pos,
            vd_rep=float(vd_rep),
            vd_lo=float(vd_lo),
            vd_window=float(vd_window),
            covered=tuple(ids[members].tolist()),
            interval_lo=tuple(lo[members].tolist()),
            interval_hi=tuple(np.remainder(lo[members] + width[members], TWO_PI).tolist()),
            mid_bearings=tuple(mid_arr.tolist()),
            deviation_f1=float(dev),
            vd_opt=float(vd_rep),
        )
        configs.append(cfg)
    return configs


# below this many coverable targets the per-point numpy overhead dominates,
# so the sweep switches to a plain-float twin of the same pipeline
_SCALAR_K = 8


def _configs_scalar(x, tsel, idx: ScenarioIndex, source: int) -> list[CandidateConfig]:
    """Scalar twin of _occluded_mask + _configs_at for a handful of targets."""
    theta = idx.scenario.sensor.theta
    eps_ang = idx.tol.eps_ang
    eps = idx.tol.eps_len
    limit = theta + eps_ang
    xx, xy = float(x[0]), float(x[1])
    apex = (xx, xy)
    lo: list[float] = []
    width: list[float] = []
    mids: list[float] = []
    ids: list[int] = []
    for j in tsel:
        near = idx.near_blockers[j]
        if near:
            sxj, syj = idx.sx_l[j], idx.sy_l[j]
            exj, eyj = idx.ex_l[j], idx.ey_l[j]
            tx_lo = min(sxj, exj, xx) - eps
            tx_hi = max(sxj, exj, xx) + eps
            ty_lo = min(syj, eyj, xy) - eps
            ty_hi = max(syj, eyj, xy) + eps
            tseg = idx.tsegs[j]
            hit = False
            for b in near:
                if (idx.bx_lo_l[b] > tx_hi or idx.bx_hi_l[b] < tx_lo
                        or idx.by_lo_l[b] > ty_hi or idx.by_hi_l[b] < ty_lo):
                    continue
                if segment_blocks_triangle(idx.bsegs[b], apex, tseg, eps):
                    hit = True
                    break
            if hit:
                continue
        b1 = math.atan2(idx.sy_l[j] - xy, idx.sx_l[j] - xx)
        b2 = math.atan2(idx.ey_l[j] - xy, idx.ex_l[j] - xx)
        diff = (b2 - b1 + math.pi) % TWO_PI - math.pi
        lo.append((b1 if diff >= 0.0 else b2) % TWO_PI)
        width.append(abs(diff))
        mids.append(math.atan2(idx.my_l[j] - xy, idx.mx_l[j] - xx) % TWO_PI)
        ids.append(idx.ids_l[j])
    k = len(ids)
    if k == 0:
        return []

    rel = [[(lo[m] - lo[a]) % TWO_PI for m in range(k)] for a in range(k)]
    # rows as bitmasks: subset test is mask & ~other == 0
    first: dict[int, int] = {}
    for a in range(k):
        ra = rel[a]
        mask = 0
        for m in range(k):
            if ra[m] + width[m] <= limit:
                mask |= 1 << m
        first.setdefault(mask, a)
    uniq = list(first.items())
    configs = []
    for mask, anchor in uniq:
        if not mask or any(mask != other and mask & ~other == 0 for other, _ in uniq):
            continue
        members = [m for m in range(k) if mask >> m & 1]
        span = max(rel[anchor][m] + width[m] for m in members)
        vd_window = theta - span
        vd_lo = norm_angle(lo[anchor] + span - theta / 2.0)
        vd_rep = norm_angle(lo[anchor] + span / 2.0)
        # re-verify angular containment at vd_rep (range/facing already hold)
        cone_lo = lo[anchor] + span / 2.0 - theta / 2.0
        ok = True
        for m in members:
            off = (lo[m] - cone_lo) % TWO_PI
            if off > TWO_PI - eps_ang:
                off = 0.0
            if off + width[m] > limit:
                ok = False
                break
        if not ok:
            continue
        members.sort(key=lambda m: ids[m])
        mid_list = [mids[m] for m in members]
        dev = sum(abs((mid - vd_rep + math.pi) % TWO_PI - math.pi) for mid in mid_list)
        configs.append(CandidateConfig(
            source=source,
            position=apex,
            vd_rep=vd_rep,
            vd_lo=vd_lo,
            vd_window=vd_window,
            covered=tuple(ids[m] for m in members),
            interval_lo=tuple(lo[m] for m in members),
            interval_hi=tuple((lo[m] + width[m]) % TWO_PI for m in members),
            mid_bearings=tuple(mid_list),
            deviation_f1=dev,
            vd_opt=vd_rep,
        ))
    return configs


def sweep_points(
    points,
    s: Scenario,
    index: ScenarioIndex | None = None,
    start_index: int = 0,
    chunk: int = 512,
) -> list[list[CandidateConfig]]:
    """Run the angular sweep at every point; results parallel to `points`."""
    idx = index if index is not None else ScenarioIndex(s)
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    out: list[list[CandidateConfig]] = []
    for base in range(0, pts.shape[0], chunk):
        block = pts[base:base + chunk]
        cheap = _coverable_mask(block, idx).tolist()
        for i in range(block.shape[0]):
            x = block[i]
            tsel = [j for j, v in enumerate(cheap[i]) if v]
            if not tsel:
                out.append([])
            elif len(tsel) <= _SCALAR_K:
                out.append(_configs_scalar(x, tsel, idx, start_index + base + i))
            else:
                tarr = np.array(tsel, dtype=np.int64)
                occ = _occluded_mask(x, tarr, idx)
                out.append(_configs_at(x, tarr[~occ], idx, start_index + base + i))
    return out


def sweep(x: Point, s: Scenario, index: ScenarioIndex | None = None) -> list[CandidateConfig]:
    """Maximal simultaneously coverable target subsets at x with their vd windows."""
    return sweep_points([x], s, index)[0]


def apply_vd_optimization(configs: list[CandidateConfig], mode: str) -> list[CandidateConfig]:
    """Replace each config's optimized direction per the requested deviation norm."""
    if mode == "none":
        return configs
    out = []
    for cfg in configs:
        alpha = optimal_vd(cfg.mid_bearings, cfg.vd_lo, cfg.vd_window, mode)
        out.append(replace(cfg, vd_opt=alpha, deviation_f1=f1_at(cfg, alpha)))
    return out
