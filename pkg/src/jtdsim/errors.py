"""Exception hierarchy.

Everything raised on bad user input derives from :class:`InputError`, and
everything raised by a numerical failure derives from :class:`NumericError`,
so the command line can map them onto exit codes 2 and 3.
"""


class JTDError(Exception):
    """Base class for all package errors."""


class InputError(JTDError, ValueError):
    """Invalid argument or malformed input data."""


class ConfigError(InputError):
    """A configuration document failed to parse or validate.

    ``key`` names the offending entry when one can be identified.
    """

    def __init__(self, message, key=None):
        self.key = key
        if key is not None:
            message = f"{key}: {message}"
        super().__init__(message)


class ParseError(InputError):
    """A data file could not be parsed. ``row``/``column`` are 1-based."""

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)


class RangeError(InputError):
    """Requested coordinates fall outside the simulated window."""


class DegenerateDataError(InputError):
    """Data carry no usable signal (zero variance, all-zero surface, ...)."""


class NumericError(JTDError, ArithmeticError):
    """A numerical routine failed."""

    def __init__(self, message, diagnostics=None):
        self.diagnostics = dict(diagnostics or {})
        super().__init__(message)


class ResolutionError(NumericError):
    """The discretization cannot resolve a physical feature."""


class FitError(NumericError):
    """A least-squares fit did not converge or collapsed."""


class SearchError(NumericError):
    """A one-dimensional search could not bracket a minimum.

    ``scan`` holds the coarse ``(x, f(x))`` samples that were examined.
    """

    def __init__(self, message, scan=None, diagnostics=None):
        self.scan = scan
        super().__init__(message, diagnostics)
