"""Exception types shared across the toolkit.

The CLI maps these to exit codes: validation errors exit 2, adapter
errors exit 3 and plain I/O failures (``OSError``) exit 4.
"""


class ValidationError(ValueError):
    """Malformed or contract-violating input data or configuration."""


class UnknownLanguageError(ValidationError):
    """A language code outside the eight supported ones."""


class AdapterError(RuntimeError):
    """An external adapter process failed or broke its line contract."""

    def __init__(self, message: str, returncode: int | None = None):
        super().__init__(message)
        self.returncode = returncode
