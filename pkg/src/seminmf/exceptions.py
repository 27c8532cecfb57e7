"""Exception hierarchy shared across the package."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to produce a trustworthy result.

    Raised when an iterative solver exceeds its iteration budget, a
    certificate fails verification, or a construction hits a breakdown
    condition.  The message carries diagnostics; callers map this to
    exit code 3 at the CLI boundary.
    """


class LpInfeasible(NumericalError):
    """The linear program has no feasible point."""


class LpUnbounded(NumericalError):
    """The linear program is unbounded below."""
