"""Exception types shared across the package.

The CLI maps these onto exit codes: DomainError (and subclasses) exit 2,
CapacityError exit 3.
"""


class DomainError(ValueError):
    """Input outside an operation's documented domain."""


class CapacityError(RuntimeError):
    """Request exceeds a configured size bound (memory cap, sieve bound...)."""


class ZeroProbabilityError(DomainError):
    """Post-selection on an outcome carrying (numerically) zero mass."""


class NormalizationError(RuntimeError):
    """A state or distribution drifted off norm beyond tolerance."""
