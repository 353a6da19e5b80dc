"""Exception hierarchy shared by every fracmont module."""


class FracMontError(Exception):
    """Base class for all library errors."""


class QuadratureError(FracMontError):
    pass


class InvalidIntegrand(QuadratureError, ValueError):
    pass


class NonFiniteSample(QuadratureError):
    pass


class ToleranceNotMet(QuadratureError):
    """Subdivision limit hit before the requested tolerance.

    The best available value and its error estimate are attached so callers
    can still report them.
    """

    def __init__(self, message, value, err_estimate):
        super().__init__(message)
        self.value = value
        self.err_estimate = err_estimate


class InvalidOrder(FracMontError, ValueError):
    pass


class InvalidFrame(FracMontError, ValueError):
    pass


class OutOfDomain(FracMontError, ValueError):
    pass


class InvalidFunction(FracMontError, ValueError):
    """A test or weight function failed its construction checks."""


class NonConverged(FracMontError):
    """An identity or bound could not be assembled to tolerance.

    ``partial`` maps term names to whatever values were obtained.
    """

    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


class UnknownName(FracMontError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class DomainInvalid(FracMontError, ValueError):
    pass
