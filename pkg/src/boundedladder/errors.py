"""Exception and warning classes shared across the package."""


class LadderError(Exception):
    """Base class for every error raised by boundedladder."""


class NonPositiveWeight(LadderError, ValueError):
    pass


class BadParams(LadderError, ValueError):
    pass


class DimensionError(LadderError, ValueError):
    pass


class IndexOutOfRange(LadderError, IndexError):
    pass


class MarginTooSmall(LadderError, ValueError):
    """Ambient dimension too small for the requested cutoff."""


class NotDiagonal(LadderError, ValueError):
    pass


class BadCutoffs(LadderError, ValueError):
    pass


class ZeroWeight(LadderError, ValueError):
    pass


class NormalizationOverflow(LadderError, OverflowError):
    """A normalization sum left the float range.

    ``k`` is the index of the first term that overflowed.
    """

    def __init__(self, k, message=None):
        self.k = k
        super().__init__(message or f"normalization term overflowed at k={k}")


class DegenerateState(LadderError, ValueError):
    pass


class MomentMismatch(LadderError, ValueError):
    """Radial measure does not reproduce the required moments.

    ``failing`` lists the moment orders that are out of tolerance.
    """

    def __init__(self, failing, message=None):
        self.failing = list(failing)
        super().__init__(message or f"moment mismatch at k={self.failing}")


class BadSpec(LadderError, ValueError):
    pass


class RhoMismatch(LadderError, ValueError):
    pass


class NotMonotone(LadderError, ValueError):
    pass


class OutOfRange(LadderError, ValueError):
    pass


class DivergentBranchWarning(RuntimeWarning):
    """Weights of this branch grow without bound."""
