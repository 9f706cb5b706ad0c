"""Multi-path Monte Carlo: left-passage field estimation, convergence
sweeps, manifests, and deterministic replica seeding.

Replica r of a run with master seed s uses the rng substream seeded by the
pair (s, r); aggregation is a sequential reduce in replica order, so results
are identical regardless of how replicas are scheduled across workers.
"""

from __future__ import annotations

import hashlib
import io
import json
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .analytic import schramm_lpp
from .errors import DomainError
from .explorer import ExplorerConfig, run_explorer
from .lattice import DomainConfig, Vec, side_components

_BOUNDARY_MARGIN = 2  # lattice units a query point must keep from the boundary


@dataclass(frozen=True)
class LppEstimate:
    """Empirical vs analytic left-passage probability at one query point."""

    point: tuple[float, float]  # snapped physical coordinates
    vertex: Vec
    n_paths: int  # paths actually aggregated (failures excluded)
    empirical: float
    se: float
    analytic: float
    difference: float


@dataclass
class LppFieldResult:
    estimates: list[LppEstimate]
    n_failed: int
    counters: dict
    per_replica: list[tuple[int, list[int]]]  # (replica, side per query: 0/1/-1)
    manifest: dict


def replica_rng(master_seed: int, replica: int) -> np.random.Generator:
    """Independent, scheduling-invariant substream for one replica."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence((master_seed, replica)))
    )


def _snap_queries(config: ExplorerConfig, query_points) -> list[Vec]:
    c = config.domain
    vertices = []
    for x, y in query_points:
        v = c.snap(float(x), float(y))
        i, j = v
        if not (
            _BOUNDARY_MARGIN <= i <= c.width - _BOUNDARY_MARGIN
            and _BOUNDARY_MARGIN <= j <= c.height - _BOUNDARY_MARGIN
        ):
            raise DomainError(
                f"query point {(x, y)} snaps to {v}, closer than "
                f"{_BOUNDARY_MARGIN} lattice units to the boundary"
            )
        vertices.append(v)
    return vertices


def _run_replica(args):
    config, master_seed, replica, vertices = args
    rng = replica_rng(master_seed, replica)
    path, state = run_explorer(config, rng=rng)
    if path.terminated != "reached_v_end":
        return replica, None, dict(state.counters)
    side = side_components(state)
    return replica, [int(side[v]) for v in vertices], dict(state.counters)


def _analytic_reference(config: ExplorerConfig, vertex: Vec) -> tuple[float, float, float]:
    """Snapped physical point (relative x measured from v0) and analytic h."""
    c = config.domain
    x, y = c.phys(*vertex)
    x0, _ = c.phys(c.v0[0] / 2.0, c.v0[1] / 2.0)
    return x, y, schramm_lpp(config.kappa, x - x0, y)


def build_manifest(config: ExplorerConfig, master_seed: int, n_paths: int) -> dict:
    """Reproducibility record; the provenance hash covers everything that
    determines the numbers (timestamps excluded)."""
    c = config.domain
    payload = {
        "version": __version__,
        "config": {
            "width": c.width,
            "height": c.height,
            "spacing": c.spacing,
            "v0": list(c.v0),
            "v_end": list(c.v_end),
            "kappa": config.kappa.kappa,
            "beta_convention": config.kappa.convention,
            "walk": {
                "nu": config.walk.nu,
                "scheme": config.walk.scheme,
                "p_floor_height": config.walk.p_floor_height,
            },
            "variation": config.variation,
            "max_steps": config.max_steps,
        },
        "master_seed": master_seed,
        "n_paths": n_paths,
        "replica_seeds": [[master_seed, r] for r in range(n_paths)],
    }
    canonical = json.dumps(payload, sort_keys=True)
    payload["provenance"] = hashlib.sha256(canonical.encode()).hexdigest()[:12]
    payload["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    return payload


def estimate_lpp_field(
    config: ExplorerConfig,
    query_points,
    n_paths: int,
    threads: int = 1,
) -> LppFieldResult:
    """Estimate the left-passage probability at each query point.

    A path "passes to the left" of a point iff the point lands in the Right
    side component, matching the orientation of the analytic formulas (h -> 1
    far on the positive-x side).  Paths that terminate without reaching v_end
    are excluded and counted.
    """
    if n_paths < 1:
        raise DomainError("n_paths must be >= 1")
    vertices = _snap_queries(config, query_points)
    master_seed = config.seed
    jobs = [(config, master_seed, r, vertices) for r in range(n_paths)]
    if threads > 1:
        import multiprocessing as mp

        with mp.get_context("fork").Pool(threads) as pool:
            raw = pool.map(_run_replica, jobs, chunksize=max(1, n_paths // (4 * threads)))
    else:
        raw = [_run_replica(j) for j in jobs]
    raw.sort(key=lambda t: t[0])  # replica order, independent of scheduling
    counters = {"plr_violations": 0, "forced_anomalies": 0, "label_anomaly": 0}
    per_replica = []
    n_failed = 0
    right_counts = np.zeros(len(vertices), dtype=np.int64)
    n_ok = 0
    for replica, sides, cnt in raw:
        for key in counters:
            counters[key] += cnt.get(key, 0)
        if sides is None:
            n_failed += 1
            per_replica.append((replica, [-1] * len(vertices)))
            continue
        n_ok += 1
        right_counts += np.asarray(sides)
        per_replica.append((replica, sides))
    estimates = []
    for q, v in enumerate(vertices):
        x, y, ref = _analytic_reference(config, v)
        if n_ok == 0:
            mean, se = float("nan"), float("nan")
        else:
            mean = right_counts[q] / n_ok
            se = float(np.sqrt(mean * (1.0 - mean) / n_ok))
        estimates.append(
            LppEstimate(
                point=(x, y),
                vertex=v,
                n_paths=n_ok,
                empirical=float(mean),
                se=se,
                analytic=ref,
                difference=float(mean - ref),
            )
        )
    manifest = build_manifest(config, master_seed, n_paths)
    manifest["n_failed"] = n_failed
    manifest["counters"] = counters
    return LppFieldResult(
        estimates=estimates,
        n_failed=n_failed,
        counters=counters,
        per_replica=per_replica,
        manifest=manifest,
    )


def pool_estimates(result: LppFieldResult, q: int, ranges: list[range]) -> float:
    """Combine disjoint replica ranges into the pooled mean for query q.

    Exists to make the replica-independence property directly checkable:
    the mean of means weighted by counts equals the pooled estimate exactly.
    """
    total = 0
    count = 0
    for rng_ in ranges:
        for rep in rng_:
            sides = result.per_replica[rep][1]
            if sides[q] >= 0:
                total += sides[q]
                count += 1
    return total / count if count else float("nan")


def convergence_sweep(
    kappas,
    sizes,
    n_paths: int,
    point: tuple[float, float] = (0.125, 0.5),
    variation: str = "v1",
    master_seed: int = 0,
    threads: int = 1,
) -> list[dict]:
    """|empirical - analytic| at a fixed physical point for growing lattices.

    ``sizes`` is an increasing list of (width, height); the spacing is scaled
    as 1/height so every domain covers the same physical rectangle.
    """
    from .params import KappaParams

    heights = [h for _, h in sizes]
    if heights != sorted(heights):
        raise DomainError("sizes must be increasing")
    rows = []
    for kappa in kappas:
        for width, height in sizes:
            config = ExplorerConfig(
                domain=DomainConfig(width, height, spacing=1.0 / height),
                kappa=KappaParams(kappa),
                variation=variation,
                seed=master_seed,
            )
            res = estimate_lpp_field(config, [point], n_paths, threads=threads)
            est = res.estimates[0]
            rows.append(
                {
                    "kappa": kappa,
                    "width": width,
                    "height": height,
                    "n_paths": est.n_paths,
                    "n_failed": res.n_failed,
                    "x": est.point[0],
                    "y": est.point[1],
                    "empirical": est.empirical,
                    "se": est.se,
                    "analytic": est.analytic,
                    "abs_diff": abs(est.difference),
                    "provenance": res.manifest["provenance"],
                }
            )
    return rows


# -- persistence ---------------------------------------------------------


def estimates_to_csv(result: LppFieldResult) -> str:
    prov = result.manifest["provenance"]
    out = io.StringIO()
    out.write("x,y,i,j,n_paths,empirical,se,analytic,difference,provenance\n")
    for e in result.estimates:
        out.write(
            f"{e.point[0]:.10g},{e.point[1]:.10g},{e.vertex[0]},{e.vertex[1]},"
            f"{e.n_paths},{e.empirical:.10g},{e.se:.10g},{e.analytic:.12g},"
            f"{e.difference:.10g},{prov}\n"
        )
    return out.getvalue()


def sweep_to_csv(rows: list[dict]) -> str:
    if not rows:
        return "kappa,width,height,n_paths,n_failed,x,y,empirical,se,analytic,abs_diff,provenance\n"
    cols = list(rows[0])
    out = io.StringIO()
    out.write(",".join(cols) + "\n")
    for row in rows:
        out.write(
            ",".join(
                f"{row[c]:.10g}" if isinstance(row[c], float) else str(row[c])
                for c in cols
            )
            + "\n"
        )
    return out.getvalue()
