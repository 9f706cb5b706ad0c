"""Exit-through-label-1 probabilities of the driving walk on the current
domain: sparse exact solve, dense absorbing-chain oracle, and Monte Carlo.

Unlabeled vertices are the unknowns; labeled vertices absorb with value
equal to their label.  Every boundary vertex is labeled by construction, so
the system is always well posed and the walk can never leave the rectangle
or slip through the path (all vertices touching the path are labeled).
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DomainError, SolverError
from .lattice import DomainState, Vec
from .params import WalkParams
from .walk import DEFAULT_STEP_BUDGET

_RESIDUAL_TOL = 1e-10
_DENSE_CAP = 2000

_DIRS = ((1, 0), (-1, 0), (0, 1), (0, -1))


@dataclass
class HittingField:
    """Field of exit probabilities; ``grid`` holds labels at labeled vertices
    and solved values at unlabeled ones."""

    grid: np.ndarray
    unlabeled: np.ndarray  # bool mask of the unknowns this field solved for
    step_index: int
    solver: str  # "sparse" | "dense_oracle" | "monte_carlo"
    residual: float

    def __getitem__(self, v: Vec) -> float:
        return float(self.grid[v[0], v[1]])

    def items(self):
        """(vertex, value) pairs over the unlabeled vertices."""
        for i, j in np.argwhere(self.unlabeled):
            yield (int(i), int(j)), float(self.grid[i, j])


def _direction_probs(params: WalkParams, height: int) -> np.ndarray:
    """(4, height+1) array of per-direction probabilities indexed by row j.

    Rows follow _DIRS: x+1, x-1, y+1, y-1.  Row j = 0 is never used (always
    labeled) and is filled with nan.
    """
    p = np.full((4, height + 1), np.nan)
    pu = params.p_up_array(np.arange(1, height + 1))
    p[0, 1:] = 0.25
    p[1, 1:] = 0.25
    p[2, 1:] = 0.25 + 0.5 * pu
    p[3, 1:] = 0.25 - 0.5 * pu
    return p


def _assemble(state: DomainState, params: WalkParams):
    """Sparse system A h = b over the unlabeled vertices."""
    labels = state.labels
    mask = state.unlabeled_mask()
    m = int(np.count_nonzero(mask))
    if m == 0:
        raise DomainError("no unlabeled vertices: nothing to solve for")
    ids = np.full(labels.shape, -1, dtype=np.int64)
    ids[mask] = np.arange(m)
    I, J = np.nonzero(mask)
    dirp = _direction_probs(params, state.config.height)
    rows = [np.arange(m)]
    cols = [np.arange(m)]
    vals = [np.ones(m)]
    b = np.zeros(m)
    for d, (di, dj) in enumerate(_DIRS):
        ni, nj = I + di, J + dj
        p = dirp[d, J]
        nb_unknown = mask[ni, nj]
        rows.append(ids[I, J][nb_unknown])
        cols.append(ids[ni, nj][nb_unknown])
        vals.append(-p[nb_unknown])
        lab_idx = ~nb_unknown
        np.add.at(
            b, ids[I, J][lab_idx], p[lab_idx] * labels[ni[lab_idx], nj[lab_idx]]
        )
    A = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(m, m),
    ).tocsc()
    return A, b, mask, ids


def _wrap_solution(state, mask, h, solver, residual) -> HittingField:
    grid = state.labels.astype(float)
    grid[mask] = h
    return HittingField(
        grid=grid,
        unlabeled=mask,
        step_index=state.step_count,
        solver=solver,
        residual=residual,
    )


def _check_residual(A, b, h) -> float:
    r = A @ h - b
    denom = max(float(np.linalg.norm(b)), 1e-300)
    rel = float(np.linalg.norm(r)) / denom
    if not np.isfinite(rel) or rel > _RESIDUAL_TOL:
        raise SolverError(f"linear solve residual {rel:.3e} exceeds {_RESIDUAL_TOL}")
    return rel


def solve_field(state: DomainState, params: WalkParams) -> HittingField:
    """Exact sparse solve of the hitting-probability system."""
    A, b, mask, _ = _assemble(state, params)
    h = spla.spsolve(A, b)
    rel = _check_residual(A, b, h)
    return _wrap_solution(state, mask, h, "sparse", rel)


def brute_force_field(state: DomainState, params: WalkParams) -> HittingField:
    """Dense absorbing-chain oracle: solve (I - Q) h = b by direct elimination."""
    A, b, mask, _ = _assemble(state, params)
    if A.shape[0] > _DENSE_CAP:
        raise DomainError(
            f"brute_force_field refuses systems larger than {_DENSE_CAP} "
            f"unknowns (got {A.shape[0]})"
        )
    h = np.linalg.solve(A.toarray(), b)
    rel = _check_residual(A, b, h)
    return _wrap_solution(state, mask, h, "dense_oracle", rel)


def refresh_after_step(
    field: HittingField, state: DomainState, params: WalkParams
) -> HittingField:
    """Field for the state after one more turn.

    The contract is equality with a fresh ``solve_field`` to 1e-10; this
    implementation re-solves (the explorer keeps its own incremental engine,
    tested against the same contract).  A no-op state returns the field
    unchanged.
    """
    if state.step_count == field.step_index:
        return field
    if state.step_count != field.step_index + 1:
        raise DomainError(
            f"refresh_after_step expects exactly one new turn "
            f"(field at n={field.step_index}, state at n={state.step_count})"
        )
    return solve_field(state, params)


def mc_estimate(
    w: Vec,
    state: DomainState,
    params: WalkParams,
    n_walks: int,
    rng: np.random.Generator,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> tuple[float, float]:
    """Monte Carlo estimate (mean, binomial SE) of the field at vertex ``w``.

    Runs ``n_walks`` independent driving walks from ``w``, absorbing on
    labeled vertices; walks are stepped in a single vectorized batch, which
    is distributionally identical to sequential sampling.
    """
    if state.label_of(w) != -1:
        raise DomainError(f"mc_estimate start vertex {w} is labeled")
    if n_walks < 1:
        raise DomainError("n_walks must be >= 1")
    labels = state.labels
    dirp = _direction_probs(params, state.config.height)
    # cumulative thresholds per height: x-1 | x+1 | y+1 | y-1
    c1 = dirp[1]
    c2 = dirp[1] + dirp[0]
    c3 = c2 + dirp[2]
    xi = np.full(n_walks, w[0], dtype=np.int64)
    yj = np.full(n_walks, w[1], dtype=np.int64)
    ones = 0
    remaining = n_walks
    for _ in range(step_budget):
        u = rng.random(remaining)
        t1, t2, t3 = c1[yj], c2[yj], c3[yj]
        dx = np.where(u < t1, -1, np.where(u < t2, 1, 0))
        dy = np.where(u < t2, 0, np.where(u < t3, 1, -1))
        xi += dx
        yj += dy
        lab = labels[xi, yj]
        absorbed = lab != -1
        if absorbed.any():
            ones += int(np.count_nonzero(lab == 1))
            keep = ~absorbed
            xi, yj = xi[keep], yj[keep]
            remaining = len(xi)
            if remaining == 0:
                mean = ones / n_walks
                se = float(np.sqrt(mean * (1.0 - mean) / n_walks))
                return mean, se
    raise SolverError(
        f"{remaining} walks still alive after the step budget; "
        "the labeled set does not appear to enclose the walk"
    )


def field_to_csv(field: HittingField, state: DomainState) -> str:
    """CSV export: x_index, y_index, x_phys, y_phys, value (unlabeled only)."""
    out = io.StringIO()
    out.write("x_index,y_index,x_phys,y_phys,value\n")
    for (i, j), val in field.items():
        x, y = state.config.phys(i, j)
        out.write(f"{i},{j},{x:.10g},{y:.10g},{val:.12g}\n")
    return out.getvalue()
