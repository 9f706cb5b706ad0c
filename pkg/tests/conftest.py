import numpy as np
import pytest

from lpexplorer.explorer import ExplorerConfig, run_explorer
from lpexplorer.lattice import DomainConfig
from lpexplorer.params import KappaParams

# Acceptance tests register one (label, passed, detail) triple each; the
# terminal-summary hook below reprints them so the pass/fail lines survive
# pytest's output capture.
ACCEPTANCE_LINES: list[tuple[str, bool, str]] = []


def record_acceptance(label: str, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append((label, passed, detail))
    print(f"{label}: {'PASS' if passed else 'FAIL'} - {detail}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(
            f"{label}: {'PASS' if passed else 'FAIL'} - {detail}"
        )


def make_rng(seed=0):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


@pytest.fixture
def rng():
    return make_rng(0)


def grow_slit_state(width=8, height=8, kappa=3.0, seed=0, n_steps=5):
    """A partially grown domain, used as a generic slit fixture."""
    cfg = ExplorerConfig(
        domain=DomainConfig(width, height),
        kappa=KappaParams(kappa),
        seed=seed,
        max_steps=n_steps,
    )
    _, state = run_explorer(cfg)
    return state, cfg
