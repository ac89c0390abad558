"""
This module contains all exceptions classes raised by lcstat.
"""


class LcstatException(Exception):
    pass


class LcstatInputException(LcstatException):
    pass


class LcstatDomainException(LcstatException):
    pass


class LcstatNumericException(LcstatException):
    """
    Raised when an iterative method does not reach its tolerance. estimate holds the
    last value (or residual) the method achieved.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class LcstatPhaseException(LcstatException):
    pass


class LcstatOptimizationException(LcstatException):
    pass


class LcstatConfigException(LcstatException):
    pass
