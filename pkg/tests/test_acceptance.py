"""End-to-end acceptance suite.

One test per release gate: full-coverage soundness for every candidate
generator, a dense-grid oracle comparison for the critical-point generator,
camera-count and runtime trends along the sensor and scenario axes, the
sampling-vs-baseline comparisons, geometric closed forms, and byte-level
reproducibility of the command-line pipeline.
"""

import csv
import math
import random
import statistics
import time

import pytest
from scipy.stats import spearmanr

from camplan.cli import CSV_COLUMNS, main, run_pipeline
from camplan.fields import aov_pair, bcpf, cpf, cpf_contains
from camplan.geom import Segment
from camplan.model import Obstacle, Scenario, SensorSpec, Target
from camplan.scenario import GenParams, random_scenario
from camplan.select import verify_solution


def sensor(aov: float = 100.0, r_max: float = 20.0) -> SensorSpec:
    return SensorSpec(aov_deg=aov, r_min=0.0, r_max=r_max, phi_deg=90.0)


def scene(n, seed, *, aov=100.0, r_max=20.0, width=100.0, height=100.0, margin=3.0):
    p = GenParams(width=width, height=height, n_targets=n, margin=margin, seed=seed)
    return random_scenario(p, sensor(aov=aov, r_max=r_max))


def solved(s, algo, **kw):
    """(cameras, runtime seconds, independently verified) for one pipeline run."""
    res = run_pipeline(s, algo, **kw)
    ok = verify_solution(s, res.solution).ok
    return res.cameras, res.runtime_ms / 1000.0, ok


def test_every_algorithm_fully_covers_random_scenarios():
    t0 = time.perf_counter()
    bad = []
    for n in (5, 10, 20):
        for seed in range(100):
            s = scene(n, seed)
            for algo, kw in (("comprehensive", {}), ("bcpf", {}), ("grid", {"grid_eps": 5.0})):
                _, _, ok = solved(s, algo, **kw)
                if not ok:
                    bad.append((n, seed, algo))
    elapsed = time.perf_counter() - t0
    assert not bad, f"coverage violations in {len(bad)} runs, first: {bad[:5]}"
    assert elapsed < 600.0, f"soundness sweep took {elapsed:.0f}s, budget is 600s"


def test_critical_point_greedy_matches_dense_grid_oracle():
    # the oracle is brute force: a quarter-meter grid swept exhaustively,
    # sharing nothing with the critical-point construction
    wins = 0
    for seed in range(20):
        s = scene(2 + seed % 5, seed, r_max=8.0, width=20.0, height=20.0, margin=1.5)
        oracle_cams, _, oracle_ok = solved(s, "grid", grid_eps=0.25)
        comp_cams, _, comp_ok = solved(s, "comprehensive")
        assert oracle_ok and comp_ok, f"seed {seed}: verification failed"
        if comp_cams <= oracle_cams:
            wins += 1
    assert wins >= 19, f"critical points matched the dense grid in only {wins}/20 runs"


def test_wider_aov_never_needs_more_cameras_and_keeps_runtime_flat():
    aovs = (40.0, 60.0, 80.0, 100.0, 120.0, 140.0)
    cams = {a: [] for a in aovs}
    times = {a: [] for a in aovs}
    for a in aovs:
        for seed in range(20):
            s = scene(80, seed, aov=a, r_max=30.0)
            c, t, ok = solved(s, "bcpf")
            assert ok, f"aov {a} seed {seed}: coverage failed"
            cams[a].append(c)
            times[a].append(t)
    means = [statistics.mean(cams[a]) for a in aovs]
    ses = [statistics.stdev(cams[a]) / math.sqrt(len(cams[a])) for a in aovs]
    for i in range(len(aovs) - 1):
        slack = math.hypot(ses[i], ses[i + 1])
        assert means[i + 1] <= means[i] + slack, (
            f"mean cameras rose {means[i]:.2f} -> {means[i + 1]:.2f} "
            f"between aov {aovs[i]:.0f} and {aovs[i + 1]:.0f} (slack {slack:.2f})"
        )
    rt = [statistics.mean(times[a]) for a in aovs]
    assert max(rt) / min(rt) < 2.0, f"mean runtimes vary more than 2x across aov: {rt}"


def test_camera_count_and_runtime_trend_with_target_count_and_range():
    def axis_means(values, make):
        cams, times = [], []
        for v in values:
            cs, ts = [], []
            for seed in range(10):
                c, t, ok = solved(make(v, seed), "bcpf")
                assert ok, f"axis value {v} seed {seed}: coverage failed"
                cs.append(c)
                ts.append(t)
            cams.append(statistics.mean(cs))
            times.append(statistics.mean(ts))
        return cams, times

    ns = (10, 40, 70, 100, 140)
    cams_n, times_n = axis_means(ns, lambda n, seed: scene(n, seed, r_max=30.0))
    assert spearmanr(ns, cams_n).statistic >= 0.8, f"cameras vs n: {cams_n}"
    assert spearmanr(ns, times_n).statistic >= 0.8, f"runtime vs n: {times_n}"

    rs = (10.0, 20.0, 30.0, 40.0, 50.0)
    cams_r, times_r = axis_means(rs, lambda r, seed: scene(80, seed, r_max=r))
    assert spearmanr(rs, cams_r).statistic <= -0.8, f"cameras vs range: {cams_r}"
    assert spearmanr(rs, times_r).statistic >= 0.8, f"runtime vs range: {times_r}"


def test_polar_sampling_beats_fine_grid_on_large_scenarios():
    b_cams, g_cams, ratios = [], [], []
    for seed in range(20):
        s = scene(140, seed, r_max=30.0)
        bc, bt, b_ok = solved(s, "bcpf")
        gc, gt, g_ok = solved(s, "grid", grid_eps=2.0)
        assert b_ok and g_ok, f"seed {seed}: coverage failed"
        b_cams.append(bc)
        g_cams.append(gc)
        ratios.append(gt / bt)
    mean_b = statistics.mean(b_cams)
    mean_g = statistics.mean(g_cams)
    saving = (mean_g - mean_b) / mean_g
    assert mean_b <= mean_g, f"sampling used more cameras: {mean_b:.2f} vs {mean_g:.2f}"
    assert 0.02 <= saving <= 0.25, f"camera saving {saving:.1%} outside [2%, 25%]"
    ratio = statistics.median(ratios)
    assert ratio >= 1.0, f"median runtime ratio grid/sampling {ratio:.2f} below 1"


def test_polar_sampling_runs_an_order_of_magnitude_faster_than_critical_points():
    comp_t, samp_t = [], []
    for seed in range(15):
        s = scene(25, seed)
        _, tc, c_ok = solved(s, "comprehensive")
        _, tb, b_ok = solved(s, "bcpf")
        assert c_ok and b_ok, f"seed {seed}: coverage failed"
        comp_t.append(tc)
        samp_t.append(tb)
    ratio = statistics.median(comp_t) / statistics.median(samp_t)
    assert ratio >= 10.0, f"median runtime ratio {ratio:.1f}x below 10x"


def test_view_circle_closed_forms_region_shape_and_predicate_agreement():
    # circle seeing a chord of length 2 under 60 degrees: radius 2/sqrt(3),
    # center offset 1/sqrt(3) from the chord midpoint
    chord = Segment((0.0, 0.0), (2.0, 0.0))
    acute = aov_pair(chord, math.pi / 3.0)
    assert acute.c_plus.radius == pytest.approx(1.1547005383792515, abs=1e-9)
    assert acute.c_plus.center == pytest.approx((1.0, 0.5773502691896258), abs=1e-9)
    assert acute.c_minus.center == pytest.approx((1.0, -0.5773502691896258), abs=1e-9)
    obtuse = aov_pair(chord, 2.0 * math.pi / 3.0)
    assert obtuse.c_plus.radius == pytest.approx(1.1547005383792515, abs=1e-9)
    # obtuse viewing angle: the bounding arc crosses to the other side
    assert obtuse.c_plus.center == pytest.approx((1.0, -0.5773502691896258), abs=1e-9)

    t = Target(0, (50.0, 50.0), (51.0, 50.0), (0.0, 1.0))
    wide = SensorSpec(aov_deg=120.0, r_min=0.0, r_max=10.0, phi_deg=90.0)
    assert sum(1 for _ in bcpf(t, wide).pieces()) == 5

    scenes = [
        Scenario(width=100.0, height=100.0, sensor=sensor(), targets=(t,)),
        Scenario(width=100.0, height=100.0, sensor=sensor(), targets=(t,),
                 obstacles=(Obstacle(0, ((47.0, 53.0), (50.2, 52.0))),)),
        Scenario(width=100.0, height=100.0, sensor=sensor(),
                 targets=(t, Target(1, (53.0, 54.0), (54.0, 54.0), (0.0, -1.0)))),
    ]
    rng = random.Random(20)
    for k, s in enumerate(scenes):
        reg = cpf(t, s)
        disagreements = 0
        for _ in range(10_000):
            p = (rng.uniform(28.0, 72.0), rng.uniform(28.0, 72.0))
            if reg.boundary_distance(p) <= 1e-6:
                continue
            if reg.contains(p) != cpf_contains(t, s, p):
                disagreements += 1
        assert disagreements == 0, f"scene {k}: {disagreements} region/predicate mismatches"


def _run_cli(argv):
    code = main(list(argv))
    assert code == 0, f"camplan {' '.join(argv)} exited {code}"


def _rows_without_runtime(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    col = rows[0].index("runtime_ms")
    return [r[:col] + r[col + 1:] for r in rows]


def test_identical_reruns_produce_identical_files(tmp_path):
    scn = tmp_path / "scenario.json"
    gen = ["generate", "--n", "8", "--seed", "5", "--margin", "3",
           "--r-max", "20", "--out", str(scn)]
    _run_cli(gen)
    first = scn.read_bytes()
    _run_cli(gen)
    assert scn.read_bytes() == first, "generate is not reproducible"

    for algo, extra in (("comprehensive", []), ("bcpf", ["--eps-a", "0.1"]),
                        ("grid", ["--grid-eps", "5"])):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for out in (a, b):
            _run_cli(["solve", str(scn), "--algo", algo, *extra, "--out", str(out)])
        assert a.read_bytes() == b.read_bytes(), f"{algo} solutions differ between reruns"

    bench = ["bench", "--axis", "n", "--values", "4,8", "--algos", "bcpf:0.1,grid:5",
             "--seeds", "2", "--margin", "3", "--r-max", "20"]
    c1, c2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
    _run_cli(bench + ["--out", str(c1)])
    _run_cli(bench + ["--out", str(c2)])
    assert _rows_without_runtime(c1) == _rows_without_runtime(c2)
    with open(c1, newline="") as fh:
        assert next(csv.reader(fh)) == CSV_COLUMNS
