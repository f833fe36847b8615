"""Exception types shared across the package."""


class RsslError(Exception):
    """Base class for package errors."""


class DataError(RsslError, ValueError):
    """Malformed or unsupported input data."""


class NumericalError(RsslError, ArithmeticError):
    """A fit could not be completed (e.g. degenerate resamples beyond the retry budget)."""
