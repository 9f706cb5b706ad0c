"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


class NumericError(ArithmeticError):
    """A numerical routine failed to converge or produced garbage."""


class ConfigError(ValueError):
    """Inconsistent or out-of-range configuration."""


class ConsistencyError(RuntimeError):
    """A label update tried to overwrite an existing, different label."""


class StuckError(RuntimeError):
    """The exploration tip is heading out of the domain."""


class RunawayWalkError(RuntimeError):
    """A sampled walk exceeded its step budget (absorbing set not enclosing)."""


class SolverError(RuntimeError):
    """A linear solve failed or left too large a residual."""


class ClassificationError(RuntimeError):
    """Flood fill could not assign a vertex to either side of the path."""


class UnsupportedRegimeError(ValueError):
    """The requested diagnostic is only defined in a different parameter regime."""
