"""Exceptions shared by the pipeline stages and mapped to CLI exit codes."""


class DataError(ValueError):
    """Input data cannot be used: malformed corpus, empty sets, bad sizes."""


class DivergenceError(RuntimeError):
    """Training produced a non-finite loss."""
