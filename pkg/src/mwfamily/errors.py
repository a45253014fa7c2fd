"""Exception hierarchy shared by all modules."""


class MWFamilyError(Exception):
    pass


class DomainError(MWFamilyError, ValueError):
    """Input outside the mathematical domain of an operation."""


class UndefinedValuationError(DomainError):
    pass


class PreconditionError(MWFamilyError):
    pass


class IncompleteFactorizationError(MWFamilyError):
    """Raised when the effort bound runs out; ``partial`` holds what was found."""

    def __init__(self, message, partial=None, cofactor=None):
        super().__init__(message)
        self.partial = partial
        self.cofactor = cofactor


class IndeterminateError(MWFamilyError):
    pass


class StrategyError(MWFamilyError):
    pass


class UnsupportedReductionError(MWFamilyError):
    pass


class InternalContradictionError(MWFamilyError):
    pass


class NotApplicableError(MWFamilyError):
    pass
