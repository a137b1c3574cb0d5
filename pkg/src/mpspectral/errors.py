"""Exception types raised across the package.

Every input-validation failure derives from :class:`MultipartiteError`, itself a
``ValueError``, so callers can catch one class at the boundary.
"""


class MultipartiteError(ValueError):
    pass


class MultipartiteViolationError(MultipartiteError):
    """An edge joins two nodes of the same group."""


class IsolatedNodeError(MultipartiteError):
    pass


class SameGroupError(MultipartiteError):
    pass


class EmptyGraphError(MultipartiteError):
    pass


class EmptySubgraphError(EmptyGraphError):
    pass


class WeightRangeError(MultipartiteError):
    pass


class SpecError(MultipartiteError):
    pass


class DegenerateError(SpecError):
    pass


class AsymmetryError(SpecError):
    pass


class ProbabilityRangeError(SpecError):
    pass


class DimensionError(MultipartiteError):
    pass


class TooFewValuesError(MultipartiteError):
    pass


class KTooLargeError(MultipartiteError):
    pass


class EmptyGroupAfterFilterError(MultipartiteError):
    pass


class LengthMismatchError(MultipartiteError):
    pass


class RankDeficientError(MultipartiteError):
    pass


class ZeroDegreeTargetError(MultipartiteError):
    pass


class UnsupportedDistributionError(MultipartiteError):
    pass


class DegenerateMomentError(MultipartiteError):
    pass


class ConvergenceError(RuntimeError):
    """Iterative eigensolver hit its iteration budget."""
