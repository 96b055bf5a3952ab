"""Shared exception types. The CLI maps these onto process exit codes."""


class SelfTeachError(Exception):
    """Base class for every error raised by this package."""


class UsageError(SelfTeachError):
    """Bad invocation or configuration (exit code 1)."""


class DataError(SelfTeachError):
    """Malformed or invariant-violating input data (exit code 2)."""


class ParseError(DataError):
    """A record could not be decoded; the message carries the line number."""


class ValidationError(DataError):
    """A decoded record violates a field invariant; the message names the field."""


class RetrievalError(DataError):
    """A search backend failed and no cached result was available."""


class CheckpointError(DataError):
    """A parameter checkpoint is corrupt or incompatible with the request."""


class NumericalError(SelfTeachError):
    """A loss or gradient became non-finite (exit code 3)."""
