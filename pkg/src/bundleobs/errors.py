"""Exception types shared across the library."""


class BundleobsError(Exception):
    """Base class for all library errors."""


class DimensionError(BundleobsError):
    """A coordinate vector or matrix has the wrong shape."""


class KindMismatchError(BundleobsError):
    """Operands live on different groups/algebras or point kinds."""


class BranchAmbiguityError(BundleobsError):
    """Rotation angle too close to pi for a well-defined principal log."""


class ProjectionFailureError(BundleobsError):
    """Input matrix cannot be repaired onto the group."""


class OriginError(BundleobsError):
    """Point at (or too close to) the excluded origin of R^3 \\ {0}."""


class RankDeficiencyError(BundleobsError):
    """Landmark matrix is rank deficient (coplanar or too few landmarks)."""


class NotFiberInjectiveError(BundleobsError):
    """Output map is not one-to-one on fibers; associated section undefined."""


class NumericalBlowupError(BundleobsError):
    """Integration produced non-finite values."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class ConfigError(BundleobsError):
    """Scenario file is missing, unreadable, or inconsistent."""
