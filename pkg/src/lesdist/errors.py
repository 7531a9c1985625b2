"""Exception hierarchy shared by all lesdist modules."""


class LesError(Exception):
    """Base class for every error raised by lesdist."""


class DataError(LesError, ValueError):
    """Malformed or degenerate input data (parse failures, NaN, duplicates)."""


class ConfigurationError(LesError, ValueError):
    """Invalid parameters or incomparable descriptors."""


class NumericalError(LesError, ArithmeticError):
    """A numerical routine failed (Cholesky breakdown, non-finite values, non-SPD input)."""
