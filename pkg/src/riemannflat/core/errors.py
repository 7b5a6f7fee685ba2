"""
Typed errors raised by the numerical core
"""


class RiemannFlatError(Exception):
    """Base class for every computation error of the toolkit"""


class InvalidArgumentError(RiemannFlatError, ValueError):
    """An argument lies outside the domain of the operation"""


class AliasingError(RiemannFlatError):
    """The grid is too coarse to represent the polynomial without aliasing"""


class BudgetExceededError(RiemannFlatError):
    """An exact path would exceed its memory budget"""


class UndefinedFlatnessError(RiemannFlatError):
    """Flatness requested for a filtered function or increment that vanishes"""


class TruncationError(RiemannFlatError):
    """The series truncation is too coarse for the requested scales"""


class ConvergenceError(RiemannFlatError):
    """Grid quadrature did not settle under refinement"""
