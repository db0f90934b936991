"""Exception hierarchy shared by all modules."""


class MeasureFlowError(Exception):
    """Base class for all errors raised by :mod:`measureflow`."""


class OutOfDomainError(MeasureFlowError, ValueError):
    pass


class NonFiniteStateError(MeasureFlowError, FloatingPointError):
    """NaN or Inf appeared while integrating a trajectory."""


class NumericalFailure(MeasureFlowError, RuntimeError):
    """The LP solver did not terminate within its iteration cap."""


class SupportTooLargeError(MeasureFlowError, ValueError):
    pass


class InvalidFamilyError(MeasureFlowError, ValueError):
    pass


class NegativeInputError(MeasureFlowError, ValueError):
    pass


class DegenerateFitError(MeasureFlowError, ValueError):
    """All table entries are at or below tolerance: the scheme is exact.

    ``c_hat`` still carries ``max D_k / M_k`` so callers can report it.
    """

    def __init__(self, msg, c_hat=0.0):
        super().__init__(msg)
        self.c_hat = c_hat


class ZeroDenominatorError(MeasureFlowError, ZeroDivisionError):
    """Initial data coincide; ``num`` holds the observed sup distance."""

    def __init__(self, msg, num=0.0):
        super().__init__(msg)
        self.num = num


class ConfigInvalid(MeasureFlowError, ValueError):
    pass
