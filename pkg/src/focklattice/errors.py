"""Exception types shared across the package."""


class FockLatticeError(Exception):
    """Base class for all errors raised by focklattice."""


class ValidationError(FockLatticeError, ValueError):
    """Invalid input: bad occupations, mismatched shapes, malformed configs."""


class CapacityError(ValidationError):
    """A Fock space is too large for the configured basis cap or for exact int64 keys."""


class ComputationError(FockLatticeError, RuntimeError):
    """A numerical routine failed (e.g. eigensolver non-convergence)."""
