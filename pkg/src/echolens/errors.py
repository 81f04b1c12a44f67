"""Exception hierarchy shared across the toolkit.

Exit-code mapping used by the CLI: ValidationError -> 2, InputError -> 3,
InvariantError -> 4.
"""


class EchoLensError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(EchoLensError):
    """Input data violates a documented contract (bad record, bad config)."""


class SchemaError(ValidationError):
    """A field mapping does not cover a mandatory field."""


class DomainError(ValidationError):
    """An argument is outside an operation's domain."""


class InputError(EchoLensError):
    """A source file is missing or unreadable."""


class InvariantError(EchoLensError):
    """An internal consistency check failed; indicates a bug."""
