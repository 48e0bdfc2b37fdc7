"""Exception hierarchy shared across the package and mapped to CLI exit codes."""


class QcorrError(Exception):
    """Base class for all package errors."""


class ParseError(QcorrError):
    """Malformed input file or JSON payload (CLI exit code 2)."""


class InvariantError(QcorrError):
    """A physical or structural invariant is violated (CLI exit code 3)."""


class UsageError(QcorrError):
    """Unknown measure, suite, or otherwise bad invocation (CLI exit code 64)."""
