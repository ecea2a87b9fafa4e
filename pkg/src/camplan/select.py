"""Greedy set-cover over candidate configurations and solution verification."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geom import bearing, norm_angle, point_segment_distance, wrap_pi
from .model import CameraPlacement, CandidateConfig, Scenario, Solution
from .fields import occlusion_excluded
from .sweep import optimal_vd, subset_window


class InfeasibleError(Exception):
    """Coverage stalled; `uncovered` lists the target ids no config can add."""

    def __init__(self, uncovered):
        self.uncovered = tuple(sorted(uncovered))
        super().__init__(f"no candidate configuration covers targets {list(self.uncovered)}")


def _subset_f1(cfg: CandidateConfig, ids, theta: float) -> float:
    """Minimum total deviation achievable for `ids` within their vd window."""
    lo, window = subset_window(cfg, ids, theta)
    wanted = set(ids)
    mids = [b for tid, b in zip(cfg.covered, cfg.mid_bearings) if tid in wanted]
    alpha = optimal_vd(mids, lo, window, "f1")
    return sum(abs(wrap_pi(b - alpha)) for b in mids)


def greedy_cover(configs: list[CandidateConfig], s: Scenario, vd_mode: str = "f1") -> Solution:
    """Pick configs by maximum new coverage; break ties by minimum achievable
    total deviation over the newly covered targets, then by lowest config index.

    Each selected camera's final direction is re-optimized for exactly the
    targets assigned to it.
    """
    ids = [t.id for t in s.targets]
    col = {tid: k for k, tid in enumerate(ids)}
    n = len(ids)
    theta = s.sensor.theta

    if n == 0:
        return Solution(placements=[], assignment={}, meta={"rounds": 0})

    m = len(configs)
    cover = np.zeros((m, n), dtype=bool)
    for i, cfg in enumerate(configs):
        for tid in cfg.covered:
            if tid in col:
                cover[i, col[tid]] = True

    uncovered = np.ones(n, dtype=bool)
    placements: list[CameraPlacement] = []
    assignment: dict[int, int] = {}
    selected: list[int] = []

    while uncovered.any():
        gains = cover[:, uncovered].sum(axis=1) if m else np.zeros(0, dtype=int)
        best_gain = gains.max() if m else 0
        if best_gain == 0:
            raise InfeasibleError([ids[k] for k in np.flatnonzero(uncovered)])
        tied = np.flatnonzero(gains == best_gain)
        if tied.size > 1:
            remaining = {ids[k] for k in np.flatnonzero(uncovered)}
            scored = []
            for i in tied:
                new_ids = [tid for tid in configs[i].covered if tid in remaining]
                scored.append((_subset_f1(configs[i], new_ids, theta), i))
            pick = int(min(scored)[1])
        else:
            pick = int(tied[0])

        cfg = configs[pick]
        new_ids = [tid for tid in cfg.covered if uncovered[col[tid]]]
        lo, window = subset_window(cfg, new_ids, theta)
        wanted = set(new_ids)
        mids = [b for tid, b in zip(cfg.covered, cfg.mid_bearings) if tid in wanted]
        alpha = cfg.vd_rep if vd_mode == "none" else optimal_vd(mids, lo, window, vd_mode)
        index = len(placements)
        placements.append(CameraPlacement(cfg.position, norm_angle(alpha)))
        for tid in new_ids:
            assignment[tid] = index
            uncovered[col[tid]] = False
        selected.append(pick)

    return Solution(
        placements=placements,
        assignment=assignment,
        meta={"rounds": len(placements), "selected_configs": selected},
    )


# --- verification -------------------------------------------------------------


@dataclass
class TargetCheck:
    target_id: int
    ok: bool
    clauses: dict = field(default_factory=dict)   # clause name -> bool
    margins: dict = field(default_factory=dict)   # diagnostic slacks

    def failed_clauses(self) -> list[str]:
        return [name for name, good in self.clauses.items() if not good]


@dataclass
class VerificationReport:
    checks: list[TargetCheck]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[TargetCheck]:
        return [c for c in self.checks if not c.ok]


def verify_solution(s: Scenario, sol: Solution) -> VerificationReport:
    """Re-check every target against its assigned placement from first principles."""
    checks = []
    for t in s.targets:
        idx = sol.assignment.get(t.id)
        if idx is None or not (0 <= idx < len(sol.placements)):
            checks.append(TargetCheck(t.id, False, {"assigned": False}, {}))
            continue
        cam = sol.placements[idx]
        checks.append(_check_target(t, cam, s))
    return VerificationReport(checks)


def _check_target(t, cam: CameraPlacement, s: Scenario) -> TargetCheck:
    tol = s.tol
    sensor = s.sensor
    x = cam.position
    clauses: dict = {}
    margins: dict = {}

    clauses["in_area"] = s.in_area(x, tol.eps_len)

    d_s = math.dist(x, t.start)
    d_e = math.dist(x, t.end)
    margins["range_slack"] = sensor.r_max - max(d_s, d_e)
    seg_d = point_segment_distance(x, t.segment)
    margins["inner_slack"] = seg_d - sensor.r_min
    clauses["range"] = (
        min(d_s, d_e) > tol.eps_len
        and margins["range_slack"] >= -tol.eps_len
        and margins["inner_slack"] >= -tol.eps_len
    )

    vx, vy = x[0] - t.midpoint[0], x[1] - t.midpoint[1]
    if vx == 0.0 and vy == 0.0:
        facing_angle = math.pi
    else:
        facing_angle = math.atan2(abs(t.normal[0] * vy - t.normal[1] * vx),
                                  t.normal[0] * vx + t.normal[1] * vy)
    margins["facing_angle"] = facing_angle
    clauses["facing"] = facing_angle <= sensor.phi + tol.eps_ang

    if clauses["range"]:
        spread = max(abs(wrap_pi(bearing(x, e) - cam.vd)) for e in (t.start, t.end))
        margins["angular_slack"] = sensor.theta / 2.0 - spread
        clauses["view_angle"] = margins["angular_slack"] >= -tol.eps_ang
    else:
        margins["angular_slack"] = -math.pi
        clauses["view_angle"] = False

    clauses["occlusion"] = not occlusion_excluded(t, x, s)

    return TargetCheck(t.id, all(clauses.values()), clauses, margins)
