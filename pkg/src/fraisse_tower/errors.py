"""Exception hierarchy shared by every module of the package."""


class FraisseError(Exception):
    """Base class for all errors raised by this package."""


class VocabularyMismatch(FraisseError):
    pass


class UnknownSymbol(FraisseError, KeyError):
    pass


class BoundExceeded(FraisseError):
    pass


class NotSubset(FraisseError):
    pass


class PreconditionFailed(FraisseError):
    pass


class BudgetExhausted(FraisseError):
    """No witness was found within the search budget.

    This does not prove that none exists: the caller has to decide whether
    the age is defective or the budget was too small.
    """


class AmalgamFailed(FraisseError):
    """A constructive amalgamation routine could not produce an amalgam."""


class DefectiveAge(FraisseError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class RangeNotBuilt(FraisseError):
    pass


class HorizonExceeded(FraisseError):
    pass


class NotLimit(FraisseError):
    pass


class NotationSyntaxError(FraisseError, ValueError):
    pass
