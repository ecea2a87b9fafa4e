"""Command line interface.

Subcommands: generate, solve, verify, candidates, bench. Exit codes: 0 success,
1 verification failure, 2 parse/input error, 3 validation error, 4 infeasible,
5 a solve whose own verification failed.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from dataclasses import dataclass
from multiprocessing import Pool
from pathlib import Path

from .discretize import CandidateSet, bcpf_sample, comprehensive_candidates, grid_sample
from .model import Scenario, SensorSpec, Solution, validate_scenario
from .scenario import (
    GenParams,
    PackingError,
    ParseError,
    ValidationFailure,
    parse_scenario,
    parse_solution,
    random_scenario,
    serialize_candidates,
    serialize_scenario,
    serialize_solution,
)
from .select import InfeasibleError, greedy_cover, verify_solution
from .sweep import sweep_points, total_deviation

EXIT_OK = 0
EXIT_UNCOVERED = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_INFEASIBLE = 4
EXIT_SELFCHECK = 5

CSV_COLUMNS = [
    "algo", "seed", "n", "aov_deg", "r_max", "eps_a", "eps_r", "grid_eps",
    "cameras", "runtime_ms", "candidates", "total_f1", "status",
]


@dataclass
class SolveResult:
    solution: Solution
    candidates: CandidateSet
    configs: int
    runtime_ms: float

    @property
    def cameras(self) -> int:
        return len(self.solution.placements)


def build_candidates(s: Scenario, algo: str, eps_a: float, eps_r: float | None,
                     grid_eps: float) -> CandidateSet:
    if algo == "comprehensive":
        return comprehensive_candidates(s)
    if algo == "bcpf":
        return bcpf_sample(s, eps_a=eps_a, eps_r=s.sensor.r_max if eps_r is None else eps_r)
    if algo == "grid":
        return grid_sample(s, grid_eps)
    raise ValueError(f"unknown algorithm {algo!r}")


def run_pipeline(s: Scenario, algo: str, *, eps_a: float = 0.1, eps_r: float | None = None,
                 grid_eps: float = 2.0, vd_mode: str = "f1") -> SolveResult:
    """Candidate generation, angular sweep, greedy selection. The reported
    runtime covers exactly these three stages."""
    t0 = time.perf_counter()
    cs = build_candidates(s, algo, eps_a, eps_r, grid_eps)
    configs = [cfg for group in sweep_points(cs.points, s) for cfg in group]
    sol = greedy_cover(configs, s, vd_mode=vd_mode)
    runtime_ms = (time.perf_counter() - t0) * 1000.0
    return SolveResult(solution=sol, candidates=cs, configs=len(configs), runtime_ms=runtime_ms)


def solution_f1(s: Scenario, sol: Solution) -> float:
    by_id = {t.id: t for t in s.targets}
    total = 0.0
    for tid, idx in sol.assignment.items():
        cam = sol.placements[idx]
        total += total_deviation(cam.position, cam.vd, [by_id[tid]])
    return total


# --- shared plumbing ---------------------------------------------------------

def _read_scenario(path: str) -> Scenario:
    return parse_scenario(Path(path).read_text(encoding="utf-8"))


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def _sensor_from_args(args) -> SensorSpec:
    return SensorSpec(aov_deg=args.aov, r_min=args.r_min, r_max=args.r_max, phi_deg=args.phi)


def _add_sensor_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--aov", type=float, default=100.0, help="angle of view, degrees")
    p.add_argument("--r-min", type=float, default=0.0, help="minimum viewing range, meters")
    p.add_argument("--r-max", type=float, default=30.0, help="maximum viewing range, meters")
    p.add_argument("--phi", type=float, default=90.0, help="facing tolerance, degrees")


def _add_algo_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--algo", choices=["comprehensive", "bcpf", "grid"], default="bcpf")
    p.add_argument("--eps-a", type=float, default=0.1, help="bcpf angular step, radians")
    p.add_argument("--eps-r", type=float, default=None,
                   help="bcpf radial step, meters (default: r_max, one outer ring)")
    p.add_argument("--grid-eps", type=float, default=2.0, help="grid spacing, meters")


# --- subcommands ----------------------------------------------------------------

def cmd_generate(args) -> int:
    params = GenParams(
        width=args.width, height=args.height, n_targets=args.n,
        target_width=args.target_width, min_separation=args.min_sep,
        n_obstacles=args.obstacles, margin=args.margin, seed=args.seed,
    )
    s = random_scenario(params, _sensor_from_args(args))
    _write(args.out, serialize_scenario(s))
    return EXIT_OK


def cmd_solve(args) -> int:
    s = _read_scenario(args.scenario)
    res = run_pipeline(s, args.algo, eps_a=args.eps_a, eps_r=args.eps_r,
                       grid_eps=args.grid_eps, vd_mode=args.vd_opt)
    report = verify_solution(s, res.solution)
    f1 = solution_f1(s, res.solution)
    print(f"cameras={res.cameras} runtime_ms={res.runtime_ms:.3f} "
          f"candidates={len(res.candidates)} configs={res.configs} total_f1={f1:.6f} "
          f"verified={'ok' if report.ok else 'FAILED'}")
    if args.out:
        _write(args.out, serialize_solution(res.solution))
    if not report.ok:
        for check in report.failures():
            print(f"  target {check.target_id}: {','.join(check.failed_clauses())}", file=sys.stderr)
        return EXIT_SELFCHECK
    return EXIT_OK


def cmd_verify(args) -> int:
    s = _read_scenario(args.scenario)
    sol = parse_solution(Path(args.solution).read_text(encoding="utf-8"))
    known = {t.id for t in s.targets}
    stray = sorted(set(sol.assignment) - known)
    if stray:
        print(f"solution references unknown target ids: {stray}", file=sys.stderr)
        return EXIT_PARSE
    bad_idx = sorted(i for i in sol.assignment.values() if not 0 <= i < len(sol.placements))
    if bad_idx:
        print(f"solution references missing placements: {bad_idx}", file=sys.stderr)
        return EXIT_PARSE
    report = verify_solution(s, sol)
    for check in report.checks:
        if check.ok:
            print(f"target {check.target_id}: covered")
        else:
            print(f"target {check.target_id}: NOT COVERED ({','.join(check.failed_clauses())})")
    print(f"verified={'ok' if report.ok else 'FAILED'} "
          f"({sum(c.ok for c in report.checks)}/{len(report.checks)} targets)")
    return EXIT_OK if report.ok else EXIT_UNCOVERED


def cmd_candidates(args) -> int:
    s = _read_scenario(args.scenario)
    cs = build_candidates(s, args.algo, args.eps_a, args.eps_r, args.grid_eps)
    print(f"candidates={len(cs)} uncoverable={list(cs.uncoverable)}")
    if args.out:
        _write(args.out, serialize_candidates(cs))
    return EXIT_OK


# --- bench ------------------------------------------------------------------------

def _parse_algo_spec(spec: str) -> dict:
    """'bcpf:0.1', 'bcpf:0.1:5', 'grid:2' or 'comprehensive'."""
    parts = spec.split(":")
    name = parts[0]
    if name == "comprehensive":
        if len(parts) > 1:
            raise ValueError(f"comprehensive takes no parameters: {spec!r}")
        return {"algo": name, "eps_a": None, "eps_r": None, "grid_eps": None}
    if name == "bcpf":
        eps_a = float(parts[1]) if len(parts) > 1 else 0.1
        eps_r = float(parts[2]) if len(parts) > 2 else None
        return {"algo": name, "eps_a": eps_a, "eps_r": eps_r, "grid_eps": None}
    if name == "grid":
        return {"algo": name, "eps_a": None, "eps_r": None,
                "grid_eps": float(parts[1]) if len(parts) > 1 else 2.0}
    raise ValueError(f"unknown algorithm spec {spec!r}")


def _bench_cell(job: dict) -> list[dict]:
    """One (axis value x algorithm) cell: a discarded warmup, then every seed."""
    spec = job["spec"]
    rows = []
    for k, seed in enumerate([job["seeds"][0], *job["seeds"]]):
        warmup = k == 0
        base = {
            "algo": spec["algo"], "seed": seed, "n": job["n"],
            "aov_deg": job["aov"], "r_max": job["r_max"],
            "eps_a": spec["eps_a"],
            "eps_r": (job["r_max"] if spec["eps_r"] is None and spec["algo"] == "bcpf"
                      else spec["eps_r"]),
            "grid_eps": spec["grid_eps"],
            "cameras": None, "runtime_ms": None, "candidates": None,
            "total_f1": None, "status": "ok",
        }
        try:
            params = GenParams(
                width=job["width"], height=job["height"], n_targets=job["n"],
                target_width=job["target_width"], margin=job["margin"], seed=seed,
            )
            sensor = SensorSpec(aov_deg=job["aov"], r_min=job["r_min"],
                                r_max=job["r_max"], phi_deg=job["phi"])
            s = random_scenario(params, sensor)
            res = run_pipeline(s, spec["algo"], eps_a=spec["eps_a"] or 0.1,
                               eps_r=spec["eps_r"], grid_eps=spec["grid_eps"] or 2.0,
                               vd_mode=job["vd_mode"])
            base["cameras"] = res.cameras
            base["runtime_ms"] = round(res.runtime_ms, 3)
            base["candidates"] = len(res.candidates)
            base["total_f1"] = round(solution_f1(s, res.solution), 9)
            if not verify_solution(s, res.solution).ok:
                base["status"] = "verify-failed"
        except InfeasibleError as e:
            base["status"] = f"infeasible:{len(e.uncovered)}"
        except Exception as e:  # noqa: BLE001 - a cell failure must not kill the sweep
            base["status"] = f"error:{type(e).__name__}"
        if not warmup:
            rows.append(base)
    return rows


def cmd_bench(args) -> int:
    try:
        specs = [_parse_algo_spec(a) for a in args.algos.split(",") if a]
        values = [float(v) for v in args.values.split(",") if v]
    except ValueError as e:
        print(f"bench spec error: {e}", file=sys.stderr)
        return EXIT_PARSE
    seeds = list(range(args.seeds))
    jobs = []
    for value in values:
        for spec in specs:
            job = {
                "spec": spec, "seeds": seeds, "vd_mode": args.vd_opt,
                "n": args.n, "aov": args.aov, "r_max": args.r_max,
                "r_min": args.r_min, "phi": args.phi,
                "width": args.width, "height": args.height,
                "target_width": args.target_width, "margin": args.margin,
            }
            if args.axis == "n":
                job["n"] = int(value)
            elif args.axis == "r_max":
                job["r_max"] = value
            else:
                job["aov"] = value
            jobs.append(job)

    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", encoding="utf-8", newline="")
    try:
        writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        out.flush()

        def emit(rows):
            for row in rows:
                writer.writerow({k: ("" if v is None else v) for k, v in row.items()})
            out.flush()

        if args.workers > 1:
            with Pool(processes=args.workers) as pool:
                for rows in pool.imap(_bench_cell, jobs):
                    emit(rows)
        else:
            for job in jobs:
                emit(_bench_cell(job))
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


# --- entry point --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="camplan",
        description="Minimum-camera coverage planning for oriented segment targets.",
        epilog="Exit codes: 0 ok, 1 coverage verification failed, 2 parse error, "
               "3 invalid scenario, 4 infeasible, 5 solve self-check failed.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random scenario")
    p.add_argument("--n", type=int, default=10, help="target count")
    p.add_argument("--width", type=float, default=100.0)
    p.add_argument("--height", type=float, default=100.0)
    p.add_argument("--target-width", type=float, default=1.0)
    p.add_argument("--min-sep", type=float, default=None,
                   help="minimum gap between segments (default: one target width)")
    p.add_argument("--obstacles", type=int, default=0)
    p.add_argument("--margin", type=float, default=0.0,
                   help="keep segments this far from the area edges")
    p.add_argument("--seed", type=int, default=0)
    _add_sensor_flags(p)
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="plan cameras for a scenario file")
    p.add_argument("scenario")
    _add_algo_flags(p)
    p.add_argument("--vd-opt", choices=["none", "f1", "finf"], default="f1",
                   help="viewing-direction optimization mode")
    p.add_argument("--out", default=None, help="solution output path")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a solution file against a scenario")
    p.add_argument("scenario")
    p.add_argument("solution")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("candidates", help="dump a candidate set")
    p.add_argument("scenario")
    _add_algo_flags(p)
    p.add_argument("--out", default=None, help="candidate dump path")
    p.set_defaults(func=cmd_candidates)

    p = sub.add_parser(
        "bench",
        help="parameter sweep to CSV",
        description="Runs every (axis value x algorithm x seed) cell and appends rows "
                    "incrementally. CSV columns: " + ", ".join(CSV_COLUMNS) + ". "
                    "Rows with a non-ok status carry the failure tag; runtime_ms covers "
                    "candidate generation, sweep and selection only.",
    )
    p.add_argument("--axis", choices=["n", "r_max", "aov"], required=True)
    p.add_argument("--values", required=True, help="comma-separated axis values")
    p.add_argument("--algos", required=True,
                   help="comma-separated specs: comprehensive, bcpf:EPS_A[:EPS_R], grid:EPS")
    p.add_argument("--seeds", type=int, default=10, help="seeds 0..N-1 per cell")
    p.add_argument("--n", type=int, default=80)
    p.add_argument("--width", type=float, default=100.0)
    p.add_argument("--height", type=float, default=100.0)
    p.add_argument("--target-width", type=float, default=1.0)
    p.add_argument("--margin", type=float, default=0.0,
                   help="keep segments this far from the area edges")
    _add_sensor_flags(p)
    p.add_argument("--vd-opt", choices=["none", "f1", "finf"], default="f1")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as e:
        print(f"cannot read {e.filename}", file=sys.stderr)
        return EXIT_PARSE
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationFailure as e:
        print(f"validation error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except (PackingError, ValueError) as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except InfeasibleError as e:
        print(f"infeasible: no candidate covers targets {list(e.uncovered)}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
