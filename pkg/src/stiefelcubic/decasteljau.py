"""Adjusted de Casteljau construction of cubic polynomials on St(n, k).

Given endpoints ``S0, S3`` and endpoint velocities ``V0, V3`` the two
control points are obtained by retracting ``V0 / 3`` from ``S0`` and
``-V3 / 3`` from ``S3``. The curve is then generated by three levels of
quasi-geodesic interpolation, all evaluated at the same parameter ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matcore import (
    _decompose,
    _mat,
    check_stiefel,
    check_tangent,
    expm_skew,
    logm_orthogonal,
    project_tangent,
    reflector,
)
from .errors import PrincipalLogUndefined
from .trajectory import TrajectoryRecord

FD_STEP = 1e-4


@dataclass(frozen=True)
class CubicBoundaryData:
    S0: np.ndarray
    S3: np.ndarray
    V0: np.ndarray
    V3: np.ndarray

    def __post_init__(self):
        S0 = check_stiefel(self.S0)
        S3 = check_stiefel(self.S3)
        if S0.shape != S3.shape:
            raise ValueError("endpoints must have the same shape")
        object.__setattr__(self, "S0", S0)
        object.__setattr__(self, "S3", S3)
        object.__setattr__(self, "V0", check_tangent(S0, self.V0))
        object.__setattr__(self, "V3", check_tangent(S3, self.V3))


@dataclass(frozen=True)
class CubicCurve:
    """Boundary data plus the constant generators and control points."""

    boundary: CubicBoundaryData
    X0: np.ndarray
    Omega0: np.ndarray
    X2: np.ndarray
    Omega2: np.ndarray
    S1: np.ndarray
    S2: np.ndarray
    X1: np.ndarray
    Omega1: np.ndarray

    @property
    def S0(self) -> np.ndarray:
        return self.boundary.S0

    @property
    def S3(self) -> np.ndarray:
        return self.boundary.S3

    def __call__(self, t: float) -> np.ndarray:
        return eval_cubic(self, t)


def _skew(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A - A.T)


def build_cubic(b: CubicBoundaryData) -> CubicCurve:
    """Compute control points and constant generators for the boundary data."""
    S0, S3 = b.S0, b.S3
    X0, Om0 = _decompose(S0, _mat(b.V0))
    X0, Om0 = X0 / 3.0, _skew(Om0) / 3.0
    X2, Om2 = _decompose(S3, _mat(b.V3))
    X2, Om2 = -X2 / 3.0, -_skew(Om2) / 3.0
    S1 = expm_skew(X0) @ S0 @ expm_skew(Om0)
    S2 = expm_skew(X2) @ S3 @ expm_skew(Om2)
    X1 = 0.5 * logm_orthogonal(reflector(S2) @ reflector(S1), where="X1")
    Om1 = logm_orthogonal(S1.T @ expm_skew(-X1) @ S2, where="Omega1")
    return CubicCurve(b, X0, Om0, X2, Om2, S1, S2, X1, Om1)


def _log(Q: np.ndarray, name: str, t: float) -> np.ndarray:
    try:
        return logm_orthogonal(Q, where=name)
    except PrincipalLogUndefined as exc:
        raise PrincipalLogUndefined(
            f"logarithm for {name}(t) undefined at t={t!r}", where=name, t=t
        ) from exc


def eval_cubic(c: CubicCurve, t: float) -> np.ndarray:
    """Evaluate ``gamma(t) = e^{tX5} e^{tX3} e^{tX0} S0 e^{tO0} e^{tO3} e^{tO5}``.

    The time-dependent generators ``X3 .. Omega5`` are recomputed for every
    ``t``. A failing intermediate logarithm raises ``PrincipalLogUndefined``
    whose ``where`` attribute names the generator.
    """
    t = float(t)
    S0, S1, S2 = c.boundary.S0, c.S1, c.S2
    E0, F0 = expm_skew(t * c.X0), expm_skew(t * c.Omega0)
    E1, F1 = expm_skew(t * c.X1), expm_skew(t * c.Omega1)
    E2, F2 = expm_skew(-t * c.X2), expm_skew(-t * c.Omega2)

    # first level: points at t on S0->S1, S1->S2, S2->S3
    A0 = E0 @ S0 @ F0
    A1 = E1 @ S1 @ F1
    A2 = E2 @ S2 @ F2
    R0, R1, R2 = reflector(A0), reflector(A1), reflector(A2)

    X3 = 0.5 * _log(R1 @ R0, "X3", t)
    Om3 = _log(A0.T @ expm_skew(-X3) @ A1, "Omega3", t)
    X4 = 0.5 * _log(R2 @ R1, "X4", t)
    Om4 = _log(A1.T @ expm_skew(-X4) @ A2, "Omega4", t)

    # second level
    B0 = expm_skew(t * X3) @ A0 @ expm_skew(t * Om3)
    B1 = expm_skew(t * X4) @ A1 @ expm_skew(t * Om4)

    X5 = 0.5 * _log(reflector(B1) @ reflector(B0), "X5", t)
    Om5 = _log(B0.T @ expm_skew(-X5) @ B1, "Omega5", t)
    return expm_skew(t * X5) @ B0 @ expm_skew(t * Om5)


def eval_cubic_velocity(c: CubicCurve, t: float, step: float = FD_STEP) -> np.ndarray:
    """Finite-difference velocity of the cubic, projected to the tangent space.

    Fourth-order central differences in the interior; one-sided fourth-order
    stencils within ``2 * step`` of either endpoint.
    """
    t = float(t)
    if t - 2 * step < 0.0:
        f = [eval_cubic(c, t + i * step) for i in range(5)]
        d = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * step)
    elif t + 2 * step > 1.0:
        f = [eval_cubic(c, t - i * step) for i in range(5)]
        d = -(-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * step)
    else:
        d = (
            -eval_cubic(c, t + 2 * step)
            + 8 * eval_cubic(c, t + step)
            - 8 * eval_cubic(c, t - step)
            + eval_cubic(c, t - 2 * step)
        ) / (12 * step)
    return project_tangent(eval_cubic(c, t), d)


def sample_cubic_at(c: CubicCurve, times, method: str = "gcp") -> TrajectoryRecord:
    times = np.asarray(times, dtype=float)
    pts = np.array([eval_cubic(c, t) for t in times])
    n_steps = len(times) - 1
    return TrajectoryRecord(times, pts, method, h=1.0 / n_steps if n_steps else float("nan"), N=n_steps)


def sample_cubic(c: CubicCurve, N: int) -> TrajectoryRecord:
    """Evaluate the cubic at ``t_j = j / (N - 1)``, ``j = 0 .. N - 1``."""
    if N < 2:
        raise ValueError("need at least two samples")
    return sample_cubic_at(c, np.arange(N) / (N - 1))
