"""Exception hierarchy.

Precondition violations are ``ValueError`` subclasses.  Numerical failures
(no convergence, infeasible parameters, solver trouble) derive from
:class:`NumericalError` so the CLI can map them to exit code 1.
"""


class DimensionError(ValueError):
    """Matrix shapes do not fit the operation."""


class ContractError(ValueError):
    """An input violates a documented precondition (e.g. not idempotent)."""


class DomainError(ValueError):
    """Argument outside the domain where the operation is defined."""


class NumericalError(RuntimeError):
    pass


class SpectralGapError(NumericalError):
    """Spectrum too close to the line Re z = 1/2 to split."""


class IterationError(NumericalError):
    """An iterative method hit its iteration cap."""


class InfeasibleError(NumericalError):
    """No parameter value satisfies the requested constraint."""


class SolverError(NumericalError):
    """The simplex solver stopped without a verdict (e.g. iteration cap)."""
