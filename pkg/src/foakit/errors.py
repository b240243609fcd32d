"""Exception types shared across the toolkit.

The CLI maps these onto its exit codes: validation problems exit 2, I/O
problems (plain ``OSError``) exit 3 and numerical failures exit 4.
"""


class ValidationError(ValueError):
    """Input violates a documented precondition or manifest schema."""


class NumericalError(ArithmeticError):
    """A computation could not produce a meaningful finite result."""


class NoEstimateError(NumericalError):
    """Every analysis frame was below the silence threshold."""


class NotPositiveSemidefiniteError(NumericalError):
    """A covariance product had eigenvalues clearly below zero."""


class DivergenceError(NumericalError):
    """Training loss exceeded the divergence limit."""
