"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class StiefelError(Exception):
    """Base class for every error raised by this package."""


class NotOrthogonal(StiefelError, ValueError):
    """A matrix expected to have orthonormal columns does not."""


class NotSkew(StiefelError, ValueError):
    """A matrix expected to be skew-symmetric is not."""


class NotTangent(StiefelError, ValueError):
    """A matrix is not a tangent vector at the given base point."""


class DimensionMismatch(StiefelError, ValueError):
    """Operands have incompatible shapes."""


class PrincipalLogUndefined(StiefelError, ArithmeticError):
    """The principal logarithm does not exist (eigenvalue at or near -1).

    ``where`` names the logarithm that failed, ``t`` the curve parameter at
    which it was requested (``None`` outside of curve evaluation).
    """

    def __init__(self, message: str, where: str | None = None, t: float | None = None):
        super().__init__(message)
        self.where = where
        self.t = t


class ChartOutOfBounds(StiefelError, ValueError):
    """Chart coordinates fall inside an excluded region."""


class NonFinite(StiefelError, ArithmeticError):
    """A numeric evaluation produced inf or nan."""


class NewtonDivergence(StiefelError, RuntimeError):
    """The implicit step solver failed to converge."""


class ShootingDivergence(StiefelError, RuntimeError):
    """The shooting iteration failed to reach the boundary targets."""


class GridMismatch(StiefelError, ValueError):
    """Two trajectories are sampled on different time grids."""
