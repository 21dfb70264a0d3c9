"""Exception types shared across the package."""


class GchoError(Exception):
    """Base class for all package errors."""


class NonFinite(GchoError):
    """An input or oracle output contains NaN or Inf."""


class NonSymmetric(GchoError):
    """A matrix violates the symmetry tolerance."""


class BadBracket(GchoError):
    """Scalar root bracket does not satisfy the sign condition."""


class NoConvergence(GchoError):
    """An iterative solver exhausted its budget."""


class UnknownProblem(GchoError):
    """Requested problem name is not in the registry."""


class OnBoundary(GchoError):
    """Subgradient generators requested on a box boundary."""


class MissingHessian(GchoError):
    """Second-order model requested but no Hessian oracle is available."""


class SubsolverFailure(GchoError):
    """The driver ran out of regularization doublings."""


class OracleError(GchoError):
    """A problem oracle raised or returned garbage; carries iterate context."""


class DegenerateSeries(GchoError):
    """Rate fitting got a series dominated by values at floating-point floor."""


class RootFindFailure(GchoError):
    """Recurrence construction could not solve an equality step."""
