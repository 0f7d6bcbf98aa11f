"""End-to-end reproduction criteria.

Each test records one PASS/FAIL line (with its sub-checks) in the terminal
summary and then asserts.  Tolerances are fixed; a red line here is a real
disagreement between the model and the target behaviour.
"""

import functools
import subprocess
import sys

import numpy as np
import pytest

from lzring import dynamics, model, observables, sweep

pytestmark = pytest.mark.acceptance

WINDOW = (-30.0, 30.0)
RING = 4


@functools.lru_cache(maxsize=None)
def run(n, j1=0.0, j2=0.0, r=1.0, dt=1e-3):
    h = model.build_hamiltonian(model.CouplingParams(j1=j1, j2=j2, r=r), model.ring_topology(n))
    return dynamics.evolve(h, dynamics.IntegratorConfig(dt=dt), *WINDOW)


def ftpe(traj):
    return observables.ftpe(traj.es_mean, traj.times).ftpe


def ring_ftpe(j1, j2, r, dt=1e-3):
    return ftpe(run(RING, j1, j2, r, dt))


SIM = sweep.Simulation(n=RING, t_start=WINDOW[0], t_end=WINDOW[1])
SPAN = sweep.Axis(-2.0, 2.0, 41)


@pytest.fixture(scope="module")
def coupling_rate_rows():
    """FTPE over j1 in [-2, 2] at j2 = 0, one 41-point row per rate."""
    rates = (0.2, 0.6, 1.0, 1.4, 2.0)
    table = {}
    for r in rates:
        rows = sweep.run_grid(sweep.GridSpec(j1=SPAN, r=sweep.Axis.pinned(r)), SIM)
        table[r] = np.array([row.ftpe for row in rows])
    return np.array(SPAN.values()), table


@pytest.fixture(scope="module")
def coupling_planes():
    """41x41 (j1, j2) FTPE planes at three rates, indexed [j1, j2]."""
    planes = {}
    for r in (1.0, 7.0, 13.8):
        rows = sweep.run_grid(sweep.GridSpec(j1=SPAN, j2=SPAN, r=sweep.Axis.pinned(r)), SIM)
        planes[r] = np.array([row.ftpe for row in rows]).reshape(41, 41)
    return np.round(np.array(SPAN.values()), 9), planes


def test_single_site_closed_form(criteria_report):
    checks = []
    for r in (0.5, 1.0, 2.0, 7.0):
        measured = float(run(1, r=r).site_flip_prob[-1, 0])
        expected = dynamics.lz_closed_form(1.0, r)
        delta = abs(measured - expected)
        checks.append((f"r={r:g}: P={measured:.5f} vs {expected:.5f}, |d|={delta:.1e} <= 0.02", delta <= 0.02))
    assert criteria_report.record(1, "single-site flip probability vs closed form", checks)


def test_sign_patterns_slow_sweep(criteria_report):
    pp, pm, mp, mm = (ring_ftpe(a, b, 1.0) for a, b in ((1, 1), (1, -1), (-1, 1), (-1, -1)))
    checks = [
        (f"FTPE(1,1)={pp:.4f} >= 0.95", pp >= 0.95),
        (f"FTPE(1,-1)={pm:.4f} >= 0.90", pm >= 0.90),
        (f"FTPE(-1,1)={mp:.4f} >= 0.90", mp >= 0.90),
        (f"FTPE(-1,-1)={mm:.4f} in 0.50 +- 0.05", abs(mm - 0.5) <= 0.05),
    ]
    assert criteria_report.record(2, "r=1 ring, four coupling sign patterns", checks)


def test_sign_patterns_fast_sweep(criteria_report):
    pp, pm, mm = (ring_ftpe(a, b, 7.0) for a, b in ((1, 1), (1, -1), (-1, -1)))
    checks = [
        (f"FTPE(-1,-1)={mm:.4f} in 0.5 +- 0.1", abs(mm - 0.5) <= 0.1),
        (f"FTPE(1,1)={pp:.4f} > FTPE(1,-1)={pm:.4f}", pp > pm),
        (f"FTPE(1,1)={pp:.4f} > FTPE(-1,-1)={mm:.4f}", pp > mm),
        (f"FTPE(1,1)={pp:.4f} >= 0.9", pp >= 0.9),
    ]
    assert criteria_report.record(3, "r=7 ring, ordering of sign patterns", checks)


def test_nearest_neighbour_scan_over_rates(criteria_report, coupling_rate_rows):
    j1, table = coupling_rate_rows
    stack = np.array(list(table.values()))  # (rates, j1)
    neg = j1 <= -0.5 + 1e-9
    pos = j1 >= 0.5 - 1e-9
    neg_mean = float(stack[:, neg].mean())
    per_rate = ", ".join(f"r={r:g}: {row[neg].mean():.3f}" for r, row in table.items())
    pos_min = float(stack[:, pos].min())
    worst_rate = list(table)[int(np.argmin(stack[:, pos].min(axis=1)))]
    spread = stack.max(axis=0) - stack.min(axis=0)
    worst = int(np.argmax(spread))
    checks = [
        (f"mean FTPE for j1 in [-2,-0.5] = {neg_mean:.3f} in [0.50, 0.70] ({per_rate})",
         0.50 <= neg_mean <= 0.70),
        (f"min FTPE for j1 in [0.5,2] = {pos_min:.3f} >= 0.95 (worst at r={worst_rate:g})", pos_min >= 0.95),
        (f"max spread over rates = {spread[worst]:.3f} <= 0.15 (at j1={j1[worst]:.1f}; "
         f"{int(np.sum(spread > 0.15))}/41 values above)", spread[worst] <= 0.15),
    ]
    assert criteria_report.record(4, "j1 scan at j2=0 over five rates", checks)


def test_coupling_plane_structure(criteria_report, coupling_planes):
    axis, planes = coupling_planes
    pos = axis >= 0.5
    neg = axis <= -0.5
    slow = planes[1.0]
    quad = {
        "++": slow[np.ix_(pos, pos)].mean(),
        "+-": slow[np.ix_(pos, neg)].mean(),
        "-+": slow[np.ix_(neg, pos)].mean(),
        "--": slow[np.ix_(neg, neg)].mean(),
    }
    mixed_lo, mixed_hi = min(quad["+-"], quad["-+"]), max(quad["+-"], quad["-+"])
    counts = {r: int(np.sum(p >= 0.95)) for r, p in planes.items()}
    checks = [
        ("r=1 quadrant means " + ", ".join(f"{k}={v:.3f}" for k, v in quad.items())
         + ": ++ > mixed > --", quad["++"] > mixed_hi and mixed_lo > quad["--"]),
        (f"points with FTPE >= 0.95: r=7 {counts[7.0]} < r=1 {counts[1.0]}", counts[7.0] < counts[1.0]),
        (f"points with FTPE >= 0.95: r=13.8 {counts[13.8]} < r=7 {counts[7.0]}", counts[13.8] < counts[7.0]),
    ]
    assert criteria_report.record(5, "41x41 coupling planes at r = 1, 7, 13.8", checks)


def test_construction_matches_brute_force(criteria_report):
    rng = np.random.default_rng(2024)
    draws, mismatches = 0, 0
    for i in range(120):
        n = 1 + i % 4
        params = model.CouplingParams(
            j1=float(rng.uniform(-3, 3)), j2=float(rng.uniform(-3, 3)),
            r=float(rng.uniform(0.1, 15)), g=float(rng.uniform(0, 2)),
        )
        topo = model.ring_topology(n)
        t = float(rng.uniform(-30, 30))
        built = model.hamiltonian_at(model.build_hamiltonian(params, topo), t)
        draws += 1
        mismatches += not np.array_equal(built, model.brute_force_hamiltonian(params, topo, t))
    checks = [(f"{draws} draws over n=1..4, {mismatches} with any entry differing", mismatches == 0)]
    assert criteria_report.record(6, "operator construction vs brute force", checks)


def test_uncoupled_ring_factorises(criteria_report):
    single, ring = run(1), run(RING)
    dev = float(np.max(np.abs(ring.site_flip_prob - single.site_flip_prob)))
    checks = [(f"{len(ring.times)} samples, max deviation {dev:.2e} <= 1e-8", dev <= 1e-8 and len(ring.times) == 2001)]
    assert criteria_report.record(7, "j1=j2=0 ring equals single-site run", checks)


def test_numerical_hygiene(criteria_report):
    runs = [run(1, r=r) for r in (0.5, 1.0, 2.0, 7.0)] + [run(1), run(RING)]
    runs += [run(RING, a, b, r) for r in (1.0, 7.0) for a in (1, -1) for b in (1, -1)]
    drift = max(tr.max_norm_drift for tr in runs)
    checks = [(f"max norm drift over {len(runs)} single-point runs = {drift:.1e} <= 1e-6 "
               "(grid runs abort on drift > 1e-6)", drift <= 1e-6)]
    for a, b in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
        full, half = ring_ftpe(a, b, 1.0), ring_ftpe(a, b, 1.0, dt=5e-4)
        change = abs(full - half)
        checks.append((f"({a},{b}) r=1: FTPE change dt 1e-3 -> 5e-4 = {change:.1e} < 1e-4", change < 1e-4))
    assert criteria_report.record(8, "norm drift and step halving", checks)


def test_outputs_independent_of_thread_count(criteria_report, tmp_path):
    grid = ["--j1_min", "-2", "--j1_max", "2", "--j1_steps", "5",
            "--j2_min", "-2", "--j2_max", "2", "--j2_steps", "5", "--r", "7"]
    blobs = {}
    for threads in (1, 8):
        csv_path = tmp_path / f"t{threads}.csv"
        pgm_path = tmp_path / f"t{threads}.pgm"
        cmds = [
            ["sweep", *grid, "--threads", str(threads), "--output", str(csv_path)],
            ["heatmap", str(csv_path), "--x", "j1", "--y", "j2", "--output", str(pgm_path)],
        ]
        for cmd in cmds:
            subprocess.run([sys.executable, "-m", "lzring", *cmd], check=True)
        blobs[threads] = (csv_path.read_bytes(), pgm_path.read_bytes())
    checks = [
        (f"sweep CSV identical ({len(blobs[1][0])} bytes)", blobs[1][0] == blobs[8][0]),
        (f"PGM identical ({len(blobs[1][1])} bytes)", blobs[1][1] == blobs[8][1]),
    ]
    assert criteria_report.record(9, "--threads 1 vs --threads 8 outputs", checks)
