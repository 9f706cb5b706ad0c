"""Path growth: frontier probabilities, turn draws, label updates,
termination, and the martingale diagnostic.

Determinism contract: a run is a pure function of (config, seed).  The coin
stream is consumed at a fixed rate -- one uniform per step for variation v1,
two for v2 -- drawn even on steps whose turn is forced by existing labels,
so the stream stays aligned under refactoring.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ConfigError, DomainError, SolverError, StuckError
from .hitting import _assemble
from .lattice import (
    TURN_LEFT,
    TURN_RIGHT,
    TURN_STRAIGHT,
    DomainConfig,
    DomainState,
    PathRecord,
    Vec,
    apply_turn,
    build_domain,
    frontier,
)
from .params import KappaParams, WalkParams

#: numerical slack before p_L > p_R counts as a monotonicity violation
PLR_SLACK = 1e-12


@dataclass(frozen=True)
class ExplorerConfig:
    """Everything a single run depends on."""

    domain: DomainConfig
    kappa: KappaParams
    walk: WalkParams | None = None
    variation: str = "v1"
    max_steps: int | None = None  # default 10 * width * height
    seed: int = 0

    def __post_init__(self):
        if self.variation not in ("v1", "v2"):
            raise ConfigError(f"variation must be 'v1' or 'v2', got {self.variation!r}")
        if self.walk is None:
            object.__setattr__(self, "walk", WalkParams.from_kappa(self.kappa))
        if self.max_steps is None:
            object.__setattr__(
                self, "max_steps", 10 * self.domain.width * self.domain.height
            )
        if self.max_steps < 1:
            raise ConfigError("max_steps must be >= 1")

    def with_seed(self, seed: int) -> "ExplorerConfig":
        return replace(self, seed=seed)


def turn_v1(p_l: float, p_r: float, u: float) -> str:
    """One-coin rule: Left if u <= p_L, Straight inside (p_L, p_R), else Right.

    If p_L > p_R the straight band is empty: Left if u <= p_R, else Right.
    """
    for name, v in (("p_l", p_l), ("p_r", p_r), ("u", u)):
        if not 0.0 <= v <= 1.0:
            raise DomainError(f"turn_v1 argument {name}={v} outside [0, 1]")
    if p_l > p_r:
        return TURN_LEFT if u <= p_r else TURN_RIGHT
    if u <= p_l:
        return TURN_LEFT
    if u < p_r:
        return TURN_STRAIGHT
    return TURN_RIGHT


def turn_v2(p_l: float, p_r: float, u_l: float, u_r: float) -> str:
    """Two-coin rule: the first coin decides Left, the second splits the rest."""
    for name, v in (("p_l", p_l), ("p_r", p_r), ("u_l", u_l), ("u_r", u_r)):
        if not 0.0 <= v <= 1.0:
            raise DomainError(f"turn_v2 argument {name}={v} outside [0, 1]")
    if u_l <= p_l:
        return TURN_LEFT
    if u_r <= p_r:
        return TURN_STRAIGHT
    return TURN_RIGHT


class FieldEngine:
    """Incremental hitting-field solver for a growing label set.

    Holds the system over the *initial* unlabeled set in CSC form; labeling a
    vertex replaces its row by an identity row with right-hand side equal to
    the label, which leaves the sparsity pattern (and therefore all
    precomputed row positions) fixed.  Each query refactors the small sparse
    matrix; the eliminated reduced system is identical to a fresh
    ``solve_field``, so the two agree to solver roundoff.
    """

    def __init__(self, state: DomainState, params: WalkParams):
        A, b, mask, ids = _assemble(state, params)
        self.A = A  # csc
        self.b = b
        self.ids = ids
        self.mask0 = mask
        self.labels0 = state.labels.copy()
        m = A.shape[0]
        # positions of each row's entries inside A.data (csc: indices = rows)
        order = np.argsort(A.indices, kind="stable")
        bounds = np.searchsorted(A.indices[order], np.arange(m + 1))
        cols = np.searchsorted(A.indptr, np.arange(A.nnz), side="right") - 1
        self._row_pos = [order[bounds[k] : bounds[k + 1]] for k in range(m)]
        self._diag_pos = np.empty(m, dtype=np.int64)
        for k in range(m):
            pos = self._row_pos[k]
            self._diag_pos[k] = pos[cols[pos] == k][0]
        self._grid = None  # cached solved grid, invalidated by label()

    def label(self, v: Vec, value: int) -> None:
        """Pin vertex ``v`` (previously unlabeled) to ``value``."""
        k = int(self.ids[v[0], v[1]])
        if k < 0:
            raise DomainError(f"vertex {v} was not an unknown of this engine")
        self.A.data[self._row_pos[k]] = 0.0
        self.A.data[self._diag_pos[k]] = 1.0
        self.b[k] = float(value)
        self._grid = None

    def field_grid(self) -> np.ndarray:
        """Full grid of hitting values (labels at labeled vertices)."""
        if self._grid is None:
            try:
                h = spla.splu(self.A).solve(self.b)
            except RuntimeError as exc:  # singular factorization
                raise SolverError(f"field solve failed: {exc}") from exc
            if not np.all(np.isfinite(h)):
                raise SolverError("field solve produced non-finite values")
            grid = self.labels0.astype(float)
            grid[self.mask0] = h
            self._grid = grid
        return self._grid

    def value(self, v: Vec) -> float:
        return float(self.field_grid()[v[0], v[1]])


@dataclass
class RunStats:
    """Per-run counters surfaced in manifests and findings."""

    plr_violations: int = 0
    forced_anomalies: int = 0
    solves: int = 0


def _forced_turn(lab_l: int, lab_r: int) -> str | None:
    """Turn dictated by already-labeled frontier vertices, if any.

    The contradictory (1, 0) pattern maps to a Left turn; the caller counts
    it as an anomaly and applies the turn non-strictly.
    """
    if lab_l == 1:
        return TURN_LEFT
    if lab_r == 0:
        return TURN_RIGHT
    if lab_l == 0 and lab_r == 1:
        return TURN_STRAIGHT
    return None


def run_explorer(
    config: ExplorerConfig,
    rng: np.random.Generator | None = None,
    field_observer=None,
) -> tuple[PathRecord, DomainState]:
    """Grow one exploration path to termination.

    ``field_observer(n, state, get_grid)`` is called once for every reached
    state (n = 0 .. termination, inclusive); ``get_grid`` lazily solves and
    returns the full hitting grid for that state.

    Returns the PathRecord (also reachable via state.path) and final state;
    the state's ``counters`` carry the monotonicity-violation and anomaly
    counts.
    """
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(config.seed)))
    state = build_domain(config.domain)
    engine = FieldEngine(state, config.walk)
    stats = RunStats()
    v_end = config.domain.v_end
    two_coins = config.variation == "v2"
    while True:
        n = state.step_count
        if field_observer is not None:
            field_observer(n, state, engine.field_grid)
        if state.tip == v_end:
            state.path.terminated = "reached_v_end"
            break
        if n >= config.max_steps:
            state.path.terminated = "max_steps"
            break
        try:
            wl, wr = frontier(state)
        except StuckError:
            state.path.terminated = "stuck"
            break
        # fixed-rate coin stream, drawn before any forced-turn shortcut
        if two_coins:
            u_l, u_r = rng.random(), rng.random()
        else:
            u = rng.random()
        lab_l, lab_r = state.label_of(wl), state.label_of(wr)
        strict = True
        if lab_l != -1 and lab_r != -1:
            p_l, p_r = float(lab_l), float(lab_r)
            turn = _forced_turn(lab_l, lab_r)
            if (lab_l, lab_r) == (1, 0):
                stats.forced_anomalies += 1
                strict = False
        else:
            grid = engine.field_grid()
            stats.solves += 1
            p_l = float(lab_l) if lab_l != -1 else float(grid[wl[0], wl[1]])
            p_r = float(lab_r) if lab_r != -1 else float(grid[wr[0], wr[1]])
            turn = _forced_turn(lab_l, lab_r)
            if turn is None:
                if two_coins:
                    turn = turn_v2(p_l, p_r, u_l, u_r)
                else:
                    turn = turn_v1(p_l, p_r, u)
        if p_l > p_r + PLR_SLACK:
            stats.plr_violations += 1
        state.path.frontier_probs.append((p_l, p_r))
        apply_turn(state, turn, strict=strict)
        for v, lab in state.path.label_events[-1]:
            engine.label(v, lab)
    state.counters["plr_violations"] = stats.plr_violations
    state.counters["forced_anomalies"] = stats.forced_anomalies
    state.counters["solves"] = stats.solves
    return state.path, state


def martingale_probe(
    w: Vec,
    config: ExplorerConfig,
    n_paths: int,
    probe_step: int,
    master_seed: int | None = None,
) -> tuple[float, float]:
    """Mean and SE of the one-step increment of the hitting value at ``w``.

    Measures h_{probe_step+1}(w) - h_{probe_step}(w) over independent runs
    (one rng substream per run derived from the master seed), skipping runs
    in which ``w`` is already labeled at the probe step.  Under variation v1
    the label assignment makes this a martingale increment, so the mean is
    statistically zero.  With a single retained path the SE is nan.
    """
    c = config.domain
    if not (1 <= w[0] <= c.width - 1 and 1 <= w[1] <= c.height - 1):
        raise DomainError(f"probe vertex {w} must be interior")
    if probe_step < 0 or n_paths < 1:
        raise DomainError("probe_step must be >= 0 and n_paths >= 1")
    if master_seed is None:
        master_seed = config.seed
    run_cfg = replace(config, max_steps=probe_step + 1)
    increments = []
    for rep in range(n_paths):
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence((master_seed, rep)))
        )
        seen: dict[int, float] = {}
        labeled_at_probe = False

        def observer(n, state, get_grid, _seen=seen):
            nonlocal labeled_at_probe
            if n == probe_step and state.label_of(w) != -1:
                labeled_at_probe = True
            if n in (probe_step, probe_step + 1):
                if state.label_of(w) != -1:
                    _seen[n] = float(state.label_of(w))
                else:
                    _seen[n] = float(get_grid()[w[0], w[1]])

        run_explorer(run_cfg, rng=rng, field_observer=observer)
        if labeled_at_probe or probe_step + 1 not in seen:
            continue
        increments.append(seen[probe_step + 1] - seen[probe_step])
    if not increments:
        raise SolverError("no run retained the probe vertex unlabeled at the probe step")
    arr = np.asarray(increments)
    mean = float(arr.mean())
    if len(arr) < 2:
        return mean, float("nan")
    se = float(arr.std(ddof=1) / np.sqrt(len(arr)))
    return mean, se
