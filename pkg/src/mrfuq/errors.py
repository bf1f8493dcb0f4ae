"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes (input 2, capacity 3,
precondition 4); the service maps them onto HTTP 4xx responses.
"""


class MrfuqError(Exception):
    """Base class for all package errors."""


class InputError(MrfuqError):
    """Malformed or inconsistent user input (bad graph, bad probability, ...)."""


class ModelFormatError(InputError):
    """Model file could not be parsed; carries a 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapacityError(MrfuqError):
    """State space exceeds the enumeration cap."""

    def __init__(self, n_states: int, cap: int):
        self.n_states = n_states
        self.cap = cap
        super().__init__(
            f"state space has {n_states} configurations, above the enumeration "
            f"cap of {cap}; raise the cap to at least {n_states} to enumerate"
        )


class PreconditionError(MrfuqError):
    """A documented mathematical precondition does not hold."""


class UnsupportedPerturbationError(PreconditionError):
    """Model pair is a structural change the bound machinery cannot relate."""


class RangeError(PreconditionError):
    """Requested value lies outside the achievable range; carries the max."""

    def __init__(self, message: str, achievable: float):
        self.achievable = achievable
        super().__init__(message)
