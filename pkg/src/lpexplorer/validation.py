"""Self-contained validation suite aggregating the package's invariants.

``run_validation_suite("fast")`` is a desk check (< 1 min); ``"full"`` adds
the Monte Carlo / invariance-principle comparisons.  Failures are report
content, not exceptions.  The findings section records the scientifically
interesting outcomes: which drift-sign convention is PDE-consistent, the
frontier-monotonicity violation count, and the two-coin martingale defect.
"""

from __future__ import annotations

import math
import time

import numpy as np

from .analytic import lawler_lpp, residual_convergence, schramm_lpp_angle
from .explorer import ExplorerConfig, martingale_probe, run_explorer
from .hitting import brute_force_field, mc_estimate, solve_field
from .lattice import DomainConfig, build_domain, side_components
from .params import KappaParams, WalkParams
from .walk import invariance_diagnostic


def _item(name, passed, detail):
    return {"name": name, "passed": bool(passed), "detail": detail}


def _slit_state(width, height, kappa, seed, n_steps):
    """A partially grown domain produced by the explorer itself."""
    cfg = ExplorerConfig(
        domain=DomainConfig(width, height),
        kappa=KappaParams(kappa),
        seed=seed,
        max_steps=n_steps,
    )
    _, state = run_explorer(cfg)
    return state, cfg


def check_analytic_agreement(kappas=(2.0, 8.0 / 3.0, 3.0, 4.0, 5.0, 6.0), n_theta=21):
    worst = 0.0
    for kappa in kappas:
        kp = KappaParams(kappa)
        for i in range(1, n_theta):
            th = math.pi * i / n_theta
            worst = max(worst, abs(schramm_lpp_angle(kp, th) - lawler_lpp(kp, th)))
    return _item("analytic_agreement", worst <= 1e-8, f"max |schramm - lawler| = {worst:.3e}")


def check_closed_forms():
    kp4, kp83 = KappaParams(4.0), KappaParams(8.0 / 3.0)
    worst4 = max(
        abs(schramm_lpp_angle(kp4, th) - (1.0 - th / math.pi))
        for th in np.linspace(0.05, math.pi - 0.05, 31)
    )
    worst83 = max(
        abs(schramm_lpp_angle(kp83, th) - (0.5 + math.cos(th) / 2.0))
        for th in np.linspace(0.05, math.pi - 0.05, 31)
    )
    center = max(
        abs(schramm_lpp_angle(KappaParams(k), math.pi / 2) - 0.5)
        for k in (2.0, 3.0, 4.0, 5.0, 6.0)
    )
    ok = worst4 <= 1e-10 and worst83 <= 1e-10 and center <= 1e-12
    return _item(
        "closed_forms",
        ok,
        f"kappa=4 err {worst4:.2e}, kappa=8/3 err {worst83:.2e}, centerline err {center:.2e}",
    )


def check_beta_sign(kappa=3.0, conventions=("matched", "paper")):
    """Which beta convention makes the five-point residual vanish at O(a^2)."""
    kp = KappaParams(kappa)
    spacings = (1.0 / 8, 1.0 / 16)
    consistent = []
    detail = {}
    for conv in conventions:
        beta = kp.beta_matched if conv == "matched" else kp.beta_paper
        sups = residual_convergence(kp, beta, spacings=spacings)
        ratio = sups[0] / sups[1]
        detail[conv] = f"sup residuals {sups[0]:.2e} -> {sups[1]:.2e} (ratio {ratio:.2f})"
        if 3.0 <= ratio <= 5.0:
            consistent.append(conv)
    passed = consistent == ["matched"]
    finding = consistent[0] if len(consistent) == 1 else f"ambiguous: {consistent}"
    return _item("beta_sign", passed, detail), finding


def check_kappa4_reduction():
    wp = WalkParams.from_kappa(KappaParams(4.0))
    worst_p = float(np.max(np.abs(wp.p_up_array(np.arange(2, 1001)))))
    state = build_domain(DomainConfig(12, 6))
    field = solve_field(state, wp)
    g = np.where(state.labels == -1, 0.5, state.labels.astype(float))
    mask = state.labels == -1
    for _ in range(60000):
        new = 0.25 * (
            np.roll(g, 1, 0) + np.roll(g, -1, 0) + np.roll(g, 1, 1) + np.roll(g, -1, 1)
        )
        g2 = np.where(mask, new, g)
        if np.max(np.abs(g2 - g)) < 1e-15:
            g = g2
            break
        g = g2
    diff = float(np.max(np.abs(g[mask] - field.grid[mask])))
    ok = worst_p == 0.0 and diff <= 1e-10
    return _item(
        "kappa4_reduction", ok, f"max |p_up| = {worst_p}, harmonic oracle diff {diff:.2e}"
    )


def check_solver_oracles(full=False):
    state, cfg = _slit_state(8, 8, 3.0, seed=11, n_steps=6)
    sparse = solve_field(state, cfg.walk)
    dense = brute_force_field(state, cfg.walk)
    diff = float(np.max(np.abs(sparse.grid - dense.grid)))
    detail = f"sparse vs dense max diff {diff:.2e}"
    ok = diff <= 1e-10
    if full:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(5)))
        cells = [tuple(map(int, v)) for v in np.argwhere(state.unlabeled_mask())[::7][:8]]
        hits = 0
        for v in cells:
            mean, se = mc_estimate(v, state, cfg.walk, 100000, rng)
            if abs(mean - sparse[v]) <= 3.0 * max(se, 1e-12):
                hits += 1
        detail += f"; MC within 3 SE at {hits}/{len(cells)} cells"
        ok = ok and hits >= int(0.85 * len(cells))
    return _item("solver_oracles", ok, detail)


def check_explorer_determinism():
    cfg = ExplorerConfig(domain=DomainConfig(12, 6), kappa=KappaParams(4.0), seed=42)
    p1, _ = run_explorer(cfg)
    p2, _ = run_explorer(cfg)
    same = p1.turns == p2.turns and p1.medial_vertices == p2.medial_vertices
    return _item("explorer_determinism", same, f"{len(p1)} steps, bit-stable={same}")


def check_frontier_monotonicity(n_paths=10, kappas=(3.0, 4.0, 5.0)):
    violations = 0
    reached = 0
    total = 0
    for kappa in kappas:
        cfg = ExplorerConfig(domain=DomainConfig(16, 8), kappa=KappaParams(kappa))
        for seed in range(n_paths):
            path, state = run_explorer(cfg.with_seed(seed))
            violations += state.counters["plr_violations"]
            total += 1
            reached += path.terminated == "reached_v_end"
    item = _item(
        "frontier_monotonicity",
        violations == 0,
        f"{violations} p_L > p_R events over {total} paths ({reached} reached v_end)",
    )
    return item, violations


def check_label_side_agreement(n_paths=10):
    bad = 0
    for seed in range(n_paths):
        cfg = ExplorerConfig(domain=DomainConfig(12, 6), kappa=KappaParams(3.0), seed=seed)
        path, state = run_explorer(cfg)
        if path.terminated != "reached_v_end":
            continue
        side = side_components(state)
        for events in path.label_events:
            for v, lab in events:
                bad += side[v] != lab
    return _item("label_side_agreement", bad == 0, f"{bad} label/side mismatches")


def check_martingale(n_paths=300, kappa=3.0, sigmas=4.0):
    cfg = ExplorerConfig(domain=DomainConfig(16, 8), kappa=KappaParams(kappa), seed=1)
    mean, se = martingale_probe((8, 4), cfg, n_paths, probe_step=5)
    ok = abs(mean) <= sigmas * se
    return _item(
        "martingale_v1", ok, f"mean increment {mean:+.4f} (SE {se:.4f}, {sigmas} SE gate)"
    )


def measure_v2_defect(n_paths=300, kappa=3.0):
    cfg = ExplorerConfig(
        domain=DomainConfig(16, 8), kappa=KappaParams(kappa), variation="v2", seed=1
    )
    mean, se = martingale_probe((8, 4), cfg, n_paths, probe_step=5)
    return {"mean_increment": mean, "se": se}


def check_turn_frequencies(n_paths=40):
    """Chi-square of v1 three-way splits against the recorded (p_L, p_R)."""
    observed = np.zeros(3)
    expected = np.zeros(3)
    cfg = ExplorerConfig(domain=DomainConfig(16, 8), kappa=KappaParams(3.0))
    for seed in range(n_paths):
        path, _ = run_explorer(cfg.with_seed(seed))
        for turn, (pl, pr) in zip(path.turns, path.frontier_probs):
            observed["LSR".index(turn)] += 1
            expected += (pl, pr - pl, 1.0 - pr)
    chi2 = float(np.sum((observed - expected) ** 2 / np.maximum(expected, 1e-12)))
    return _item(
        "turn_frequencies_v1",
        chi2 <= 9.21,  # chi-square df=2, 1% level
        f"chi2 = {chi2:.2f} over {int(observed.sum())} steps (obs {observed}, exp {expected.round(1)})",
    )


def check_invariance(n_steps=10000, n_replicas=10000):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(0)))
    ks = invariance_diagnostic(WalkParams(nu=0.5), n_steps, n_replicas, rng)
    return _item("invariance_principle", ks <= 0.02, f"KS distance {ks:.4f}")


def run_validation_suite(level: str = "fast") -> dict:
    """Execute the module invariants at desk scale; failures are report rows."""
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    t0 = time.time()
    full = level == "full"
    items = []
    findings = {}
    items.append(check_analytic_agreement())
    items.append(check_closed_forms())
    beta_item, beta_finding = check_beta_sign()
    items.append(beta_item)
    findings["pde_consistent_beta"] = beta_finding
    items.append(check_kappa4_reduction())
    items.append(check_solver_oracles(full=full))
    items.append(check_explorer_determinism())
    mono_item, violations = check_frontier_monotonicity(n_paths=100 if full else 10)
    items.append(mono_item)
    findings["plr_violations"] = violations
    items.append(check_label_side_agreement())
    items.append(check_martingale(n_paths=1000 if full else 300, sigmas=3.0 if full else 4.0))
    findings["v2_martingale_defect"] = measure_v2_defect(n_paths=300 if full else 100)
    items.append(check_turn_frequencies())
    if full:
        items.append(check_invariance())
    return {
        "level": level,
        "items": items,
        "findings": findings,
        "all_passed": all(it["passed"] for it in items),
        "elapsed_s": round(time.time() - t0, 2),
    }
