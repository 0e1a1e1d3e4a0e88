"""Exception hierarchy shared by every stclab module."""


class StcError(Exception):
    """Base class for all errors raised by stclab."""


class InvalidArgument(StcError, ValueError):
    pass


class ResourceLimit(StcError):
    """Input exceeds a configured size cap."""


class ConnectivityError(StcError):
    """The input graph is not connected enough for the requested operation."""


class DisconnectedInput(ConnectivityError):
    def __init__(self, message, component=None):
        super().__init__(message)
        self.component = component


class NoCutExists(InvalidArgument):
    """Complete graphs have no vertex cut."""


class InvalidConfiguration(StcError):
    pass


class PreconditionViolation(StcError):
    pass


class InternalError(StcError):
    """A proven invariant failed; indicates a bug or invalid input assumptions."""


class ExpandingPropertyViolation(StcError):
    pass


class GenerationFailure(StcError):
    pass
