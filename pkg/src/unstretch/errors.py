"""Exceptions shared across the package.

The CLI maps these onto exit codes: ValidationError -> 2, BudgetError -> 3,
CertificationError -> 4.
"""


class UnstretchError(Exception):
    """Base class for all package errors."""


class ValidationError(UnstretchError):
    """An input or configuration violates a documented precondition."""


class BudgetError(UnstretchError):
    """A search exhausted its element budget before completing.

    ``completed_radius`` reports the largest fully explored radius (or round)
    at the time the budget tripped; ``partial`` may carry partial results when
    they are still meaningful.
    """

    def __init__(self, message, completed_radius=None, partial=None):
        super().__init__(message)
        self.completed_radius = completed_radius
        self.partial = partial


class CertificationError(UnstretchError):
    """An exact certification failed (envelope or inclusion violation).

    This falsifies the harness, not the theory: it means arithmetic, a box
    parameter, or an inclusion bound was implemented or configured wrongly.
    """
