"""Exception types shared across the package."""


class GroupselError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(GroupselError, ValueError):
    """An array argument has the wrong shape or length."""


class RangeError(GroupselError, ValueError):
    """An index or count is outside its valid range."""


class OverlapError(GroupselError, ValueError):
    """A feature index appears in more than one group."""


class CoverageError(GroupselError, ValueError):
    """A feature index is not assigned to any group."""


class ZeroColumnError(GroupselError, ValueError):
    """A design column is identically zero and cannot be rescaled."""


class FamilyError(GroupselError, ValueError):
    """An operation requires a different objective family."""


class SingularError(GroupselError, ValueError):
    """A matrix required to be invertible is singular."""


class NoCandidates(GroupselError, RuntimeError):
    """Every group is already active; there is nothing to score."""


class PolicyError(GroupselError, ValueError):
    """A selection policy returned a group outside the candidate set."""


class CombinatorialBudgetError(GroupselError, ValueError):
    """A subset enumeration would exceed the allowed budget."""


class EngineInvariantError(GroupselError, RuntimeError):
    """An internal consistency check of the path engine failed."""
