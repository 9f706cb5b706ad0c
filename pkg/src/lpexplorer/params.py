"""Model parameters derived from kappa, and the walk parameterization.

Two sign conventions for the drift exponent beta are carried side by side:

* ``paper``:   beta = 2*(4/kappa - 1) = 8/kappa - 2
* ``matched``: beta = 2 - 8/kappa

The two agree (beta = 0) exactly at kappa = 4, where the model reduces to
the plain harmonic explorer.  The residual test in :mod:`lpexplorer.analytic`
identifies which convention is consistent with the angular left-passage
function; ``matched`` is the default because it is the one under which the
closed-form left-passage field solves the degenerate PDE.

The walk bias is tied to beta by generator matching: one lattice step has
generator (1/4)*Laplacian + (p_R/1)*d/dy with p_R ~ beta/(4R), which is the
Bessel walk of order nu = (beta-1)/2, dimension beta + 1 = 2*nu + 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError

#: p_up is clamped into [-1/2 + CLAMP_EPS, 1/2 - CLAMP_EPS]; see WalkParams.
CLAMP_EPS = 1e-12


@dataclass(frozen=True)
class KappaParams:
    """All constants derived from kappa under an explicit beta convention."""

    kappa: float
    convention: str = "matched"  # "matched" or "paper"

    def __post_init__(self):
        if not (0.0 < self.kappa < 8.0):
            raise ConfigError(f"kappa must lie in (0, 8), got {self.kappa}")
        if self.convention not in ("matched", "paper"):
            raise ConfigError(f"unknown beta convention {self.convention!r}")

    @property
    def beta_paper(self) -> float:
        return 2.0 * (4.0 / self.kappa - 1.0)

    @property
    def beta_matched(self) -> float:
        return 2.0 - 8.0 / self.kappa

    @property
    def beta(self) -> float:
        """The drift exponent under the active convention."""
        return self.beta_matched if self.convention == "matched" else self.beta_paper

    @property
    def nu(self) -> float:
        """Bessel order of the height walk, nu = (beta - 1)/2."""
        return 0.5 * (self.beta - 1.0)

    @property
    def dim_bessel(self) -> float:
        """Bessel dimension, beta + 1 = 2*nu + 2."""
        return self.beta + 1.0


@dataclass
class WalkParams:
    """Parameters of the height (discrete Bessel) walk.

    ``scheme`` selects how the up-bias p_R is computed:

    * ``csaki``: the exact transition ratio formula for R >= max(2,
      p_floor_height), falling back to the asymptotic bias below that height
      or when nu == 0 (where the ratio formula degenerates to 0/0).
    * ``asymptotic``: p_R = (2*nu + 1)/(4R), clamped.

    Heights r = 0 are always absorbing in this model (the bottom row of the
    domain is labeled boundary), so the deterministic reflection step of the
    NN-walk construction at r in {0, 1} is never used inside domains; the
    bias at r = 1 comes from the clamped asymptotic formula instead.
    """

    nu: float
    scheme: str = "csaki"
    p_floor_height: int = 2
    clamp_count: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.scheme not in ("csaki", "asymptotic"):
            raise ConfigError(f"unknown walk scheme {self.scheme!r}")
        if self.p_floor_height < 1:
            raise ConfigError("p_floor_height must be >= 1")

    @classmethod
    def from_kappa(cls, kp: KappaParams, scheme: str = "csaki") -> "WalkParams":
        return cls(nu=kp.nu, scheme=scheme)

    # -- up-bias ----------------------------------------------------------

    def p_up(self, R: int) -> float:
        """Up-bias p_R of the height walk at height R >= 1."""
        if R <= 0:
            raise DomainError(f"p_up requires R >= 1, got {R}")
        return float(self.p_up_array(np.asarray([R]))[0])

    def p_up_array(self, R: np.ndarray) -> np.ndarray:
        """Vectorized ``p_up`` over an integer array of heights (all >= 1)."""
        R = np.asarray(R, dtype=float)
        if np.any(R < 1):
            raise DomainError("p_up requires all heights >= 1")
        nu = self.nu
        asym = (2.0 * nu + 1.0) / (4.0 * R)
        if self.scheme == "csaki" and nu != 0.0:
            floor = max(2, self.p_floor_height)
            use_exact = R >= floor
            Rs = np.where(use_exact, R, 2.0)  # dummy height where masked out
            num = (Rs - 1.0) ** (-2.0 * nu) - Rs ** (-2.0 * nu)
            den = (Rs - 1.0) ** (-2.0 * nu) - (Rs + 1.0) ** (-2.0 * nu)
            exact = num / den - 0.5
            p = np.where(use_exact, exact, asym)
        else:
            p = asym
        lo, hi = -0.5 + CLAMP_EPS, 0.5 - CLAMP_EPS
        clipped = np.clip(p, lo, hi)
        n_clamped = int(np.count_nonzero(clipped != p))
        if n_clamped:
            self.clamp_count += n_clamped
        return clipped

    def p_up_table(self, max_height: int) -> np.ndarray:
        """Lookup table t with t[r] = p_up(r) for r in 1..max_height (t[0] = nan)."""
        t = np.empty(max_height + 1)
        t[0] = np.nan
        t[1:] = self.p_up_array(np.arange(1, max_height + 1))
        return t
