"""Exception hierarchy shared by all arrlab modules."""


class ArrlabError(Exception):
    """Base class for user-facing errors (the CLI maps these to exit code 1)."""


class AmbientMismatch(ArrlabError, ValueError):
    pass


class NotContained(ArrlabError, ValueError):
    pass


class CapExceeded(ArrlabError, RuntimeError):
    pass


class PreconditionViolated(ArrlabError, ValueError):
    pass


class NotRealizable(ArrlabError, ValueError):
    pass


class EmptyArrangement(ArrlabError, ValueError):
    pass


class AmbientNotPreserved(ArrlabError, ValueError):
    pass


class BadExplicitForms(ArrlabError, ValueError):
    pass


class BadElement(ArrlabError, ValueError):
    pass


class BadParam(ArrlabError, ValueError):
    pass


class ImproperMeasure(ArrlabError, ValueError):
    pass


class DegenerateProjection(ArrlabError, ValueError):
    pass


class BestEffort(ArrlabError, RuntimeError):
    """Raised by the solver when no restart reaches the tolerance.

    Carries the best fan and its report so callers can still inspect them.
    """

    def __init__(self, message, fan=None, report=None):
        super().__init__(message)
        self.fan = fan
        self.report = report
