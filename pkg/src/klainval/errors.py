"""Exception hierarchy shared by all klainval modules."""


class KlainvalError(Exception):
    """Base class for library errors."""


class DimensionMismatch(KlainvalError):
    pass


class RankDeficient(KlainvalError):
    pass


class BadDimension(KlainvalError):
    pass


class DegenerateFace(KlainvalError):
    pass


class IllConditioned(KlainvalError):
    """Polynomial interpolation residual exceeded its tolerance."""

    def __init__(self, message, residual=float("nan"), condition=float("nan")):
        super().__init__(message)
        self.residual = residual
        self.condition = condition


class MixedDegrees(KlainvalError):
    pass


class NotCentrallySymmetric(KlainvalError):
    pass


class ClassVolumeMismatch(KlainvalError):
    pass


class TilingFailure(KlainvalError):
    pass


class LPInfeasible(KlainvalError):
    pass


class LPUnbounded(KlainvalError):
    pass


class NoWitnessFound(KlainvalError):
    """The zonoid-separation LP optimum was not below the rejection threshold."""

    def __init__(self, message, objective=float("nan")):
        super().__init__(message)
        self.objective = objective


class ShiftImpossible(KlainvalError):
    pass


class KlainNotPositive(KlainvalError):
    pass


class EpsilonZero(KlainvalError):
    pass


class ParseError(KlainvalError):
    pass


class StageFailure(KlainvalError):
    """A pipeline stage failed; ``stage`` names it and ``__cause__`` holds the original error."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
