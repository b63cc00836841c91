"""Exception types shared across the package."""


class SmoothgmError(Exception):
    """Base class for all smoothgm errors."""


class AllWeightsZero(SmoothgmError):
    """No subject label falls inside the kernel window; estimation impossible."""


class NotPositiveDefinite(SmoothgmError):
    """A matrix required to be positive definite is not."""


class NotStationary(SmoothgmError):
    """Transition matrix has spectral norm >= 1 (or the Lyapunov solve diverged)."""


class BadBlocks(SmoothgmError):
    """Block sizes do not partition the requested dimension."""


class TooFewObservations(SmoothgmError):
    """Not enough rows to form the requested covariance."""


class LpError(SmoothgmError):
    """Base class for linear-programming failures."""


class Infeasible(LpError):
    """The LP constraint polytope is empty."""


class Unbounded(LpError):
    """The LP objective is unbounded below on the feasible set."""


class IterationLimit(LpError):
    """Pivot cap reached before optimality."""


class EdgeBudgetExceeded(SmoothgmError):
    """Requested edge counts exceed the d(d-1)/2 available pairs."""


class UnknownLabel(SmoothgmError):
    """A random-support path was queried off its defining label grid."""


class ResidualNotPD(SmoothgmError):
    """Sigma - A Sigma A^T is not positive definite; (Sigma, A) incompatible with a stationary VAR(1)."""


class BadPermutation(SmoothgmError):
    """Permutation is not a bijection on subject indices."""


class NoSubjectAtLabel(SmoothgmError):
    """Naive estimation requires a subject observed exactly at the target label."""


class DimensionMismatch(SmoothgmError):
    """Operands have incompatible dimensions."""


class ConfigError(SmoothgmError):
    """Experiment configuration failed validation."""
