"""The driving process: simple random walk in x paired with a discrete
Bessel-type walk in y, plus the reference Bessel law and an invariance
diagnostic for the pure height walk.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc

from .errors import DomainError, RunawayWalkError, UnsupportedRegimeError
from .params import WalkParams

DEFAULT_STEP_BUDGET = 10**9


@dataclass(frozen=True)
class WalkState:
    """Position of the (x, r) pair: lattice column and height."""

    x: int
    r: int

    def __post_init__(self):
        if self.r < 0:
            raise DomainError(f"walk height must be >= 0, got {self.r}")


def step_distribution(state: WalkState, params: WalkParams) -> dict[str, float]:
    """Per-step move distribution at the given state.

    Keys: "x-" (x-1), "x+" (x+1), "r+" (r+1), "r-" (r-1).  The x and r
    coordinates move with probability 1/2 each; the r move carries the
    height-dependent up-bias.  Height 0 is absorbing in this model, so the
    distribution is undefined there.
    """
    if state.r < 1:
        raise DomainError("step_distribution undefined at r = 0 (absorbing row)")
    p = params.p_up(state.r)
    return {
        "x-": 0.25,
        "x+": 0.25,
        "r+": 0.25 + 0.5 * p,
        "r-": 0.25 - 0.5 * p,
    }


def sample_until_absorbed(
    start: WalkState,
    absorbing,
    params: WalkParams,
    rng: np.random.Generator,
    step_budget: int = DEFAULT_STEP_BUDGET,
) -> WalkState:
    """Run the walk from ``start`` until ``absorbing(state)`` is true.

    ``absorbing`` is a predicate on WalkState; it must enclose the walk,
    otherwise the step budget trips a RunawayWalkError.
    """
    if absorbing(start):
        raise DomainError("start state is already absorbing")
    x, r = start.x, start.r
    for _ in range(step_budget):
        p = params.p_up(r)
        u = rng.random()
        if u < 0.25:
            x -= 1
        elif u < 0.5:
            x += 1
        elif u < 0.75 + 0.5 * p:
            r += 1
        else:
            r -= 1
        state = WalkState(x, r)
        if absorbing(state):
            return state
        if r == 0:
            raise DomainError(
                "walk reached height 0 without being absorbed; height-0 "
                "states must be inside the absorbing set"
            )
    raise RunawayWalkError(
        f"walk exceeded the step budget of {step_budget}; the absorbing set "
        "does not appear to enclose the walk"
    )


def bessel_marginal_cdf(nu: float, t: float, y: float) -> float:
    """CDF at y of the Bessel(nu) process at time t started from 0.

    The marginal density is proportional to y^(2 nu + 1) exp(-y^2 / (2 t)) on
    y > 0, i.e. the CDF is the regularized lower incomplete gamma function
    P(nu + 1, y^2 / (2 t)).
    """
    if not nu > -1.0:
        raise DomainError(f"bessel_marginal_cdf requires nu > -1, got {nu}")
    if not t > 0.0:
        raise DomainError(f"bessel_marginal_cdf requires t > 0, got {t}")
    if y <= 0.0:
        return 0.0
    return float(gammainc(nu + 1.0, y * y / (2.0 * t)))


def invariance_diagnostic(
    params: WalkParams,
    n_steps: int,
    n_replicas: int,
    rng: np.random.Generator,
) -> float:
    """Kolmogorov-Smirnov distance between X_n/sqrt(n) and the Bessel marginal.

    Simulates the pure height walk started at 0 with a deterministic up-move
    at height 0, biased moves elsewhere, and compares the empirical law of
    X_n / sqrt(n) over the replicas with ``bessel_marginal_cdf(nu, 1, .)``.
    Only defined for nu > 0, the transient regime covered by the invariance
    principle for this walk.
    """
    if not params.nu > 0.0:
        raise UnsupportedRegimeError(
            f"invariance_diagnostic requires nu > 0, got {params.nu}"
        )
    if n_steps < 1 or n_replicas < 1:
        raise DomainError("n_steps and n_replicas must be positive")
    heights = np.zeros(n_replicas, dtype=np.int64)
    # E[i] = P(step up | height i); E[0] = 1, else 1/2 + p_up(i).
    table_size = 64
    up_prob = np.empty(table_size)
    up_prob[0] = 1.0
    up_prob[1:] = 0.5 + params.p_up_array(np.arange(1, table_size))
    for _ in range(n_steps):
        top = int(heights.max())
        if top + 1 >= table_size:
            old = table_size
            table_size = max(2 * table_size, top + 2)
            grown = np.empty(table_size)
            grown[:old] = up_prob
            grown[old:] = 0.5 + params.p_up_array(np.arange(old, table_size))
            up_prob = grown
        u = rng.random(n_replicas)
        up = u < up_prob[heights]
        heights += np.where(up, 1, -1)
    samples = np.sort(heights / np.sqrt(n_steps))
    cdf = gammainc(params.nu + 1.0, np.maximum(samples, 0.0) ** 2 / 2.0)
    n = len(samples)
    grid = np.arange(n)
    ks = np.maximum(np.abs(grid / n - cdf), np.abs((grid + 1) / n - cdf)).max()
    return float(ks)
