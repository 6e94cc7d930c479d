"""Exception taxonomy shared across the package.

Each class carries the CLI exit code used when it escapes to the command
line, so the exit-code contract lives in one place.
"""


class ZslabError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class InvalidInput(ZslabError, ValueError):
    """Malformed argument or out-of-contract call."""

    exit_code = 2


class PreconditionViolation(ZslabError):
    """A documented operation precondition does not hold for the given input."""

    exit_code = 2


class ResourceLimit(ZslabError):
    """A search budget was exhausted; carries best-known bracketing bounds."""

    exit_code = 3

    def __init__(self, message, lower=None, upper=None):
        super().__init__(message)
        self.lower = lower
        self.upper = upper


class TheoremViolation(ZslabError):
    """A proved statement failed to verify.

    This is always an implementation-bug signal, never a mathematical
    finding; the payload is a replayable description of the instance.
    """

    exit_code = 4

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload


class DependencyMissing(ZslabError):
    """A prerequisite value could not be computed or loaded."""

    exit_code = 5
