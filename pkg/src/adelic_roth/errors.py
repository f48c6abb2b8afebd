"""Exception hierarchy shared by every module of the package."""


class AdelicError(ValueError):
    """Base class for all domain errors raised by ``adelic_roth``."""


class NonPositiveInput(AdelicError):
    pass


class ComplexEmbedding(AdelicError):
    pass


class ZeroElement(AdelicError):
    pass


class MissingFiberValue(AdelicError):
    pass


class InvalidPropertyIndex(AdelicError):
    pass


class SquareInput(AdelicError):
    pass


class ZeroHeight(AdelicError):
    pass


class ZeroPolynomial(AdelicError):
    pass


class OutOfRange(AdelicError):
    pass


class InfeasibleParams(AdelicError):
    pass


class DegenerateAlphas(AdelicError):
    pass


class RankDeficient(AdelicError):
    """The evaluated interpolation matrix does not reach full column rank.

    ``condition`` names the volume condition that was not met, so callers
    can report which hypothesis of the construction failed.
    """

    def __init__(self, message, rank=None, columns=None, condition=None):
        super().__init__(message)
        self.rank = rank
        self.columns = columns
        self.condition = condition


class UndecidedComparison(AdelicError):
    pass


class NonQuadraticAlpha(AdelicError):
    pass
