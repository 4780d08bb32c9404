"""Exception types raised by loceuclid."""


class LocEuclidError(Exception):
    """Base class for all package errors."""


class DomainError(LocEuclidError, ValueError):
    """Deformation parameter t outside (0, 1]."""


class RangeError(LocEuclidError, ValueError):
    """Chord or angle argument outside its closed range."""


class NoEmbeddingError(LocEuclidError, ValueError):
    """Two points are too far apart to lie on a common unit sphere."""


class ChainStepError(LocEuclidError, ValueError):
    """A chain step is longer than 2."""


class RealizationError(LocEuclidError, ValueError):
    """A step profile cannot be realized as a chain between the given points."""


class BudgetError(LocEuclidError, RuntimeError):
    """The DP state space exceeds the configured budget."""
