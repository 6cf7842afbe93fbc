"""Exception hierarchy shared by all modules."""


class HHLError(Exception):
    """Base class for errors raised by hhl_lab."""


class ValidationError(HHLError, ValueError):
    """Invalid input: wrong shapes, out-of-range parameters, malformed files."""


class NumericalError(HHLError, ArithmeticError):
    """A computation produced a degenerate or non-finite result."""


class DegeneratePostselection(NumericalError):
    """The postselected outcome has (numerically) zero probability."""
