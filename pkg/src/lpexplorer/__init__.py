"""lpexplorer: lattice exploration paths driven by hitting probabilities of
a (random walk x discrete Bessel walk) pair, plus the analytic left-passage
toolkit used to validate them."""

__version__ = "0.1.0"

from .analytic import lawler_lpp, pde_residual, schramm_lpp, schramm_lpp_angle
from .explorer import ExplorerConfig, martingale_probe, run_explorer, turn_v1, turn_v2
from .hitting import brute_force_field, mc_estimate, refresh_after_step, solve_field
from .lattice import DomainConfig, DomainState, PathRecord, build_domain, classify_side
from .params import KappaParams, WalkParams
from .special import gamma_fn, hyp2f1_half
from .walk import WalkState, bessel_marginal_cdf, invariance_diagnostic

__all__ = [
    "__version__",
    "KappaParams",
    "WalkParams",
    "WalkState",
    "DomainConfig",
    "DomainState",
    "PathRecord",
    "ExplorerConfig",
    "gamma_fn",
    "hyp2f1_half",
    "schramm_lpp",
    "schramm_lpp_angle",
    "lawler_lpp",
    "pde_residual",
    "build_domain",
    "classify_side",
    "solve_field",
    "brute_force_field",
    "mc_estimate",
    "refresh_after_step",
    "bessel_marginal_cdf",
    "invariance_diagnostic",
    "run_explorer",
    "martingale_probe",
    "turn_v1",
    "turn_v2",
]
