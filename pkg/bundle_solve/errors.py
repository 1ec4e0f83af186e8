"""Exception hierarchy for bundle-solve."""


class BundleSolveError(Exception):
    """Base class for all errors raised by bundle-solve."""


class ShapeError(BundleSolveError, ValueError):
    """Tensor dimensions do not match the game they are used with."""


class GameValidationError(BundleSolveError, ValueError):
    """A game or policy violates one of its invariants.

    The message names the offending index, e.g. ``transition[2][5]``.
    """


class DomainError(BundleSolveError, ValueError):
    """An argument lies outside the domain of an operation."""


class ConfigError(BundleSolveError, ValueError):
    """Invalid solver configuration value or key."""


class SingularSystemError(BundleSolveError, ArithmeticError):
    """A linear system that should be non-singular could not be solved."""


class OracleRefusalError(BundleSolveError, RuntimeError):
    """A brute-force oracle was asked for an instance above its size cap."""
