"""End-to-end acceptance gate.

One test per criterion; each prints a single PASS/FAIL line (echoed again in
the terminal summary) with the measured numbers and its tolerance.
"""

import math
import time

import numpy as np
import pytest

from conftest import grow_slit_state, make_rng, record_acceptance
from lpexplorer.analytic import lawler_lpp, residual_convergence, schramm_lpp_angle
from lpexplorer.cli import main as cli_main
from lpexplorer.experiment import estimate_lpp_field, estimates_to_csv
from lpexplorer.explorer import ExplorerConfig, martingale_probe, run_explorer
from lpexplorer.hitting import brute_force_field, mc_estimate, solve_field
from lpexplorer.lattice import DomainConfig, build_domain
from lpexplorer.params import KappaParams, WalkParams
from lpexplorer.walk import invariance_diagnostic

KAPPA_GRID = (2.0, 8.0 / 3.0, 3.0, 4.0, 5.0, 6.0)


def test_c01_analytic_agreement():
    t0 = time.time()
    worst = 0.0
    for kappa in KAPPA_GRID:
        kp = KappaParams(kappa)
        for i in range(1, 50):
            th = math.pi * i / 50
            worst = max(worst, abs(schramm_lpp_angle(kp, th) - lawler_lpp(kp, th)))
    elapsed = time.time() - t0
    ok = worst <= 1e-8 and elapsed < 5.0
    record_acceptance(
        "C1 analytic agreement",
        ok,
        f"max |hypergeometric - integral| = {worst:.2e} (tol 1e-8), {elapsed:.1f}s",
    )
    assert ok


def test_c02_closed_form_spot_checks():
    thetas = np.linspace(0.05, math.pi - 0.05, 31)
    err4 = max(
        abs(schramm_lpp_angle(KappaParams(4.0), th) - (1 - th / math.pi)) for th in thetas
    )
    err83 = max(
        abs(schramm_lpp_angle(KappaParams(8.0 / 3.0), th) - (0.5 + math.cos(th) / 2))
        for th in thetas
    )
    errc = max(
        abs(schramm_lpp_angle(KappaParams(k), math.pi / 2) - 0.5) for k in KAPPA_GRID
    )
    ok = err4 <= 1e-10 and err83 <= 1e-10 and errc <= 1e-12
    record_acceptance(
        "C2 closed forms",
        ok,
        f"kappa=4 err {err4:.2e}, kappa=8/3 err {err83:.2e} (tol 1e-10), "
        f"centerline err {errc:.2e} (tol 1e-12)",
    )
    assert ok


def test_c03_pde_residual_order():
    kp = KappaParams(3.0)
    sups = residual_convergence(kp, kp.beta_matched, spacings=(1 / 16, 1 / 32, 1 / 64))
    r1, r2 = sups[0] / sups[1], sups[1] / sups[2]
    matched_ok = 3.5 <= r1 <= 4.5 and 3.5 <= r2 <= 4.5
    sups_p = residual_convergence(kp, kp.beta_paper, spacings=(1 / 16, 1 / 32))
    paper_ok = 3.5 <= sups_p[0] / sups_p[1] <= 4.5
    kp4 = KappaParams(4.0)
    res4 = max(
        residual_convergence(kp4, beta, spacings=(1 / 64,))[0]
        for beta in (kp4.beta_matched, kp4.beta_paper)
    )
    ok = matched_ok and not paper_ok and res4 <= 1e-6
    record_acceptance(
        "C3 residual order",
        ok,
        f"matched ratios {r1:.2f}/{r2:.2f} (target [3.5, 4.5]); PDE-consistent "
        f"convention: {'matched' if matched_ok and not paper_ok else 'ambiguous'}; "
        f"kappa=4 residual {res4:.1e} (tol 1e-6)",
    )
    assert ok


def test_c04_kappa4_reduction():
    wp = WalkParams.from_kappa(KappaParams(4.0))
    max_p = float(np.max(np.abs(wp.p_up_array(np.arange(2, 10001)))))
    # slit domain produced by the explorer itself, then compared against a
    # plain 5-point harmonic relaxation
    cfg = ExplorerConfig(
        domain=DomainConfig(20, 10), kappa=KappaParams(4.0), seed=3, max_steps=12
    )
    _, state = run_explorer(cfg)
    field = solve_field(state, wp)
    g = np.where(state.labels == -1, 0.5, state.labels.astype(float))
    mask = state.labels == -1
    for _ in range(200000):
        new = 0.25 * (
            np.roll(g, 1, 0) + np.roll(g, -1, 0) + np.roll(g, 1, 1) + np.roll(g, -1, 1)
        )
        g2 = np.where(mask, new, g)
        if np.max(np.abs(g2 - g)) < 1e-15:
            g = g2
            break
        g = g2
    diff = float(np.max(np.abs(g[mask] - field.grid[mask])))
    ok = max_p == 0.0 and diff <= 1e-10
    record_acceptance(
        "C4 kappa=4 reduction",
        ok,
        f"max |p_up| on [2, 1e4] = {max_p} (exact 0); relaxation-oracle diff "
        f"{diff:.2e} (tol 1e-10)",
    )
    assert ok


def test_c05_solver_oracles():
    t0 = time.time()
    worst = 0.0
    states = []
    for i in range(10):
        kappa = (3.0, 4.0, 5.0)[i % 3]
        state, cfg = grow_slit_state(8, 8, kappa, seed=20 + i, n_steps=3 + i % 5)
        states.append((state, cfg))
        for k in (3.0, 4.0, 5.0):
            wp = WalkParams.from_kappa(KappaParams(k))
            sparse = solve_field(state, wp)
            dense = brute_force_field(state, wp)
            worst = max(worst, float(np.max(np.abs(sparse.grid - dense.grid))))
    rng = make_rng(77)
    hits = total = 0
    for state, cfg in states[:5]:
        field = solve_field(state, cfg.walk)
        cells = [tuple(map(int, v)) for v in np.argwhere(state.unlabeled_mask())[::11]][:4]
        for v in cells:
            mean, se = mc_estimate(v, state, cfg.walk, 100000, rng)
            hits += abs(mean - field[v]) <= 3.0 * max(se, 1e-9)
            total += 1
    elapsed = time.time() - t0
    ok = worst <= 1e-10 and hits >= math.ceil(0.95 * total) and elapsed < 300
    record_acceptance(
        "C5 solver oracles",
        ok,
        f"sparse-vs-dense max diff {worst:.2e} (tol 1e-10) over 30 slit systems; "
        f"MC within 3 SE at {hits}/{total} cells (need >= 95%), {elapsed:.0f}s",
    )
    assert ok


def test_c06_martingale_diagnostic():
    t0 = time.time()
    details = []
    ok = True
    for kappa in (3.0, 4.0, 5.0):
        cfg = ExplorerConfig(
            domain=DomainConfig(20, 10), kappa=KappaParams(kappa), seed=1
        )
        mean, se = martingale_probe((10, 5), cfg, 1000, probe_step=5)
        ok = ok and abs(mean) <= 3.0 * se
        details.append(f"kappa={kappa:g}: {mean:+.4f} (3 SE = {3 * se:.4f})")
    elapsed = time.time() - t0
    ok = ok and elapsed < 600
    record_acceptance(
        "C6 martingale (v1)", ok, "; ".join(details) + f", {elapsed:.0f}s"
    )
    assert ok


def test_c07_frontier_monotonicity():
    violations = 0
    paths = 0
    for kappa in (3.0, 4.0, 5.0):
        cfg = ExplorerConfig(domain=DomainConfig(16, 8), kappa=KappaParams(kappa))
        for seed in range(34):
            _, state = run_explorer(cfg.with_seed(seed))
            violations += state.counters["plr_violations"]
            paths += 1
    ok = violations == 0
    record_acceptance(
        "C7 frontier monotonicity",
        ok,
        f"{violations} p_L > p_R events (slack 1e-12) across {paths} paths",
    )
    assert ok


def test_c08_invariance_principle():
    t0 = time.time()
    ks = invariance_diagnostic(WalkParams(nu=0.5), 10000, 10000, make_rng(0))
    elapsed = time.time() - t0
    ok = ks <= 0.02 and elapsed < 120
    record_acceptance(
        "C8 invariance principle",
        ok,
        f"KS distance {ks:.4f} (tol 0.02) at n=1e4, 1e4 replicas, {elapsed:.0f}s",
    )
    assert ok


def test_c09_left_passage_kappa4():
    t0 = time.time()
    cfg = ExplorerConfig(
        domain=DomainConfig(40, 20, spacing=1 / 20), kappa=KappaParams(4.0), seed=0
    )
    center = cfg.domain.phys(20, 10)  # on the vertical center line
    off_axis = cfg.domain.phys(23, 5)  # x - x_start = y / 2
    res = estimate_lpp_field(cfg, [center, off_axis], 2000)
    ec, eo = res.estimates
    dev_c = abs(ec.empirical - 0.5)
    tol_c = 3.0 * ec.se + 0.02
    dev_o = abs(eo.empirical - eo.analytic)  # analytic = 1 - theta/pi at kappa=4
    tol_o = 3.0 * eo.se + 0.03
    elapsed = time.time() - t0
    ok = dev_c <= tol_c and dev_o <= tol_o and res.n_failed == 0 and elapsed < 900
    record_acceptance(
        "C9 left passage at kappa=4",
        ok,
        f"center |h_hat - 1/2| = {dev_c:.4f} (tol {tol_c:.4f}); off-axis "
        f"|h_hat - (1 - theta/pi)| = {dev_o:.4f} (tol {tol_o:.4f}); "
        f"{res.n_failed} failed paths, {elapsed:.0f}s",
    )
    assert ok


def test_c10_kappa3_pipeline():
    t0 = time.time()
    cfg = ExplorerConfig(
        domain=DomainConfig(40, 20, spacing=1 / 20), kappa=KappaParams(3.0), seed=0
    )
    points = [cfg.domain.phys(20, 10), cfg.domain.phys(23, 5)]
    res1 = estimate_lpp_field(cfg, points, 1000)
    res2 = estimate_lpp_field(cfg, points, 1000)
    csv1, csv2 = estimates_to_csv(res1), estimates_to_csv(res2)
    max_se = max(e.se for e in res1.estimates)
    diffs = [e.difference for e in res1.estimates]
    elapsed = time.time() - t0
    ok = max_se <= 0.016 and csv1 == csv2 and len(csv1.splitlines()) == 3
    record_acceptance(
        "C10 kappa=3 pipeline",
        ok,
        f"max SE {max_se:.4f} (tol 0.016); h_hat - analytic differences "
        f"{[round(d, 4) for d in diffs]} (recorded, no threshold); repeat "
        f"byte-identical: {csv1 == csv2}, {elapsed:.0f}s",
    )
    assert ok


def test_c11_determinism(tmp_path):
    sample_args = ("sample", "--width", "16", "--height", "8", "--seed", "11")
    field_args = (
        "field", "--width", "16", "--height", "8", "--seed", "11",
        "--point", "0,2", "--n-paths", "40",
    )
    outs = {}
    for tag, args in (("sample", sample_args), ("field", field_args)):
        for run_idx in (0, 1):
            d = tmp_path / f"{tag}{run_idx}"
            assert cli_main(["--out-dir", str(d), *args]) == 0
            outs[(tag, run_idx)] = d
    d = tmp_path / "field_t2"
    assert cli_main(["--out-dir", str(d), "--threads", "2", *field_args]) == 0

    def read(d, name):
        return (d / name).read_bytes()

    def manifest_no_ts(d):
        import json

        m = json.loads(read(d, "manifest.json"))
        m.pop("timestamp")
        return m

    same_sample = all(
        read(outs[("sample", 0)], n) == read(outs[("sample", 1)], n)
        for n in ("path.txt", "domain.json")
    ) and manifest_no_ts(outs[("sample", 0)]) == manifest_no_ts(outs[("sample", 1)])
    same_field = all(
        read(outs[("field", 0)], n) == read(outs[("field", 1)], n)
        for n in ("results.csv", "report.json")
    ) and manifest_no_ts(outs[("field", 0)]) == manifest_no_ts(outs[("field", 1)])
    thread_invariant = read(outs[("field", 0)], "results.csv") == read(d, "results.csv")
    ok = same_sample and same_field and thread_invariant
    record_acceptance(
        "C11 determinism",
        ok,
        f"sample byte-identical: {same_sample}; field byte-identical: "
        f"{same_field}; aggregates thread-invariant: {thread_invariant} "
        "(manifests compared modulo timestamp)",
    )
    assert ok
