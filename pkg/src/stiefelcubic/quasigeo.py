"""Retraction ``R_S(V) = e^X S e^Omega`` and its quasi-geodesics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .matcore import (
    _decompose,
    _mat,
    check_skew,
    check_stiefel,
    check_tangent,
    expm_skew,
    logm_orthogonal,
    reflector,
)


class CurveJet(NamedTuple):
    point: np.ndarray
    velocity: np.ndarray
    acceleration: np.ndarray


@dataclass(frozen=True)
class QuasiGeodesic:
    """The curve ``t -> e^{tX} S0 e^{t Omega}``."""

    S0: np.ndarray
    X: np.ndarray
    Omega: np.ndarray

    def __post_init__(self):
        S0 = check_stiefel(self.S0)
        n, k = S0.shape
        X = check_skew(self.X)
        Om = check_skew(self.Omega)
        if X.shape != (n, n) or Om.shape != (k, k):
            raise ValueError("generator shapes do not match the base point")
        object.__setattr__(self, "S0", S0)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Omega", Om)

    def __call__(self, t: float) -> np.ndarray:
        return expm_skew(t * self.X) @ self.S0 @ expm_skew(t * self.Omega)

    def eval(self, t: float) -> CurveJet:
        return quasi_geodesic_eval(self, t)


def retraction(S, V) -> np.ndarray:
    """Map the tangent vector ``V`` at ``S`` to ``e^X S e^Omega``."""
    S = check_stiefel(S)
    V = check_tangent(S, V)
    X, Om = _decompose(S, V)
    return expm_skew(X) @ S @ expm_skew(0.5 * (Om - Om.T))


def quasi_geodesic_eval(g: QuasiGeodesic, t: float) -> CurveJet:
    """Point, velocity and acceleration of the quasi-geodesic at ``t``."""
    S, X, Om = g.S0, g.X, g.Omega
    L = expm_skew(t * X)
    R = expm_skew(t * Om)
    XS = X @ S
    return CurveJet(
        L @ S @ R,
        L @ (XS + S @ Om) @ R,
        L @ (X @ XS + 2.0 * XS @ Om + S @ (Om @ Om)) @ R,
    )


def connect_generators(
    S0: np.ndarray, S1: np.ndarray, where: str | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Generators ``(X, Omega)`` of the quasi-geodesic from ``S0`` to ``S1``.

    Unchecked kernel behind :func:`connect`; raises ``PrincipalLogUndefined``
    when either logarithm does not exist.
    """
    X = 0.5 * logm_orthogonal(reflector(S1) @ reflector(S0), where=where and f"{where}: X")
    Om = logm_orthogonal(S0.T @ expm_skew(-X) @ S1, where=where and f"{where}: Omega")
    return X, Om


def connect(S0, S1) -> QuasiGeodesic:
    """Quasi-geodesic joining ``S0`` (at t = 0) to ``S1`` (at t = 1).

    ``X = log((I - 2 S1 S1^T)(I - 2 S0 S0^T)) / 2`` and
    ``Omega = log(S0^T e^{-X} S1)``. No subdivision is attempted when the
    endpoints are too far apart; the logarithm error propagates instead.
    The reflectors depend only on the spanned subspaces, so on St(n, 1) the
    construction needs the endpoints less than a quarter turn apart.
    """
    S0 = check_stiefel(S0)
    S1 = check_stiefel(S1)
    if S0.shape != S1.shape:
        raise ValueError(f"endpoint shapes differ: {S0.shape} vs {S1.shape}")
    X, Om = connect_generators(S0, S1, where="connect")
    return QuasiGeodesic(S0, X, Om)


def covariant_acceleration(S, V, A) -> np.ndarray:
    """Covariant acceleration of a curve for the canonical metric.

    ``S``, ``V``, ``A`` are the position, velocity and ambient second
    derivative of a curve on St(n, k). The canonical-metric geodesic equation
    reads ``A + V V^T S + S((S^T V)^2 + V^T V) = 0``; the left-hand side is
    returned.
    """
    S, V, A = _mat(S), _mat(V), _mat(A)
    W = S.T @ V
    return A + V @ (V.T @ S) + S @ (W @ W + V.T @ V)
