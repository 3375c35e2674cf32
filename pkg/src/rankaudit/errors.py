"""Exception hierarchy.

Input-shaped problems (bad files, bad parameters) and computation-time
problems (math domain, degenerate data) are kept in separate branches so
the CLI can map them to distinct exit codes.
"""


class AuditError(Exception):
    """Base class for all errors raised by this package."""


class InputError(AuditError):
    """A problem with user-supplied inputs or configuration (exit code 2)."""


class SchemaError(InputError):
    """Structurally malformed input: duplicate ids, dimension mismatch, bad header."""


class ParseError(InputError):
    """A cell or stream could not be parsed; message carries row/column coordinates."""


class ConfigError(InputError):
    """Invalid parameter or incomplete metadata for the requested operation."""


class ComputationError(AuditError):
    """A valid request that cannot be computed on this data (exit code 3)."""


class MissingScoreError(ComputationError):
    """An operation touched an absent cell; message names the model and task."""


class DomainError(ComputationError):
    """A score lies outside the mathematical domain of the requested aggregate."""


class DegenerateInputError(ComputationError):
    """The test statistic is undefined on this input (e.g. all-zero differences)."""


class UndefinedCorrelationError(ComputationError):
    """Rank correlation is undefined because one ranking is entirely tied."""
