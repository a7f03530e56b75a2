"""Exception types shared across the package."""


class LpTestError(Exception):
    """Base class for all package-specific errors."""


class NumericalFailure(LpTestError):
    """A solver could not certify its result within tolerance.

    Usually signals ill-conditioned input (near-degenerate basis solves,
    non-converging basis primitives).
    """


class TooLargeError(LpTestError):
    """An enumeration guard tripped (instance too big for an exact check)."""


class BadSpecError(LpTestError):
    """An instance-family specification is inconsistent or unbuildable."""


class BadLabelError(LpTestError):
    """A labeled point set carries labels outside the declared range."""


class EmptyInstanceError(LpTestError):
    """A tester was invoked on an instance with no constraints."""


class CertificationFailedError(LpTestError):
    """A generated fixture could not be certified by its exact oracle."""
