"""Dense matrix kernels and Stiefel/Grassmann value types.

Points of St(n, k) are ``n x k`` arrays with orthonormal columns. Tangent
vectors at ``S`` are ``n x k`` arrays ``V`` with ``V^T S + S^T V = 0``; the
alternative parametrization writes ``V = X S + S Omega`` with ``X`` skew
``n x n`` in ``so_P(n)`` (``P = S S^T``) and ``Omega`` skew ``k x k``.

The public functions accept either bare arrays or the dataclass wrappers
defined here and always return plain ``numpy`` arrays (or small frozen
dataclasses for composite results).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    NotOrthogonal,
    NotSkew,
    NotTangent,
    PrincipalLogUndefined,
)

TOL_ORTH = 1e-10
EPS_LOG = 1e-8
# Orthogonality slack accepted by the logarithm (looser than TOL_ORTH since
# its inputs are products of several exponentials).
TOL_LOG_ORTH = 1e-8


def _mat(x) -> np.ndarray:
    """Unwrap a dataclass value or coerce an array-like to a float array."""
    for attr in ("S", "V", "A", "P"):
        inner = getattr(x, attr, None)
        if isinstance(inner, np.ndarray):
            return inner
    return np.asarray(x, dtype=float)


def _scaled_tol(tol: float, *arrays: np.ndarray) -> float:
    return tol * max(1.0, *(float(np.linalg.norm(a)) for a in arrays))


def orthonormality_defect(S) -> float:
    """Frobenius norm of ``S^T S - I``."""
    S = _mat(S)
    return float(np.linalg.norm(S.T @ S - np.eye(S.shape[1])))


def is_stiefel(S, tol: float = TOL_ORTH) -> bool:
    S = _mat(S)
    return S.ndim == 2 and S.shape[1] <= S.shape[0] and orthonormality_defect(S) <= tol


def check_stiefel(S, tol: float = TOL_ORTH) -> np.ndarray:
    S = _mat(S)
    if S.ndim != 2 or S.shape[1] > S.shape[0] or S.shape[1] < 1:
        raise DimensionMismatch(f"expected an n x k matrix with 1 <= k <= n, got {S.shape}")
    err = orthonormality_defect(S)
    if err > tol:
        raise NotOrthogonal(f"columns are not orthonormal (|S^T S - I| = {err:.3e})")
    return S


def skew_part(A) -> np.ndarray:
    A = _mat(A)
    return 0.5 * (A - A.T)


def is_skew(A, tol: float = TOL_ORTH) -> bool:
    A = _mat(A)
    return A.ndim == 2 and A.shape[0] == A.shape[1] and float(np.linalg.norm(A + A.T)) <= tol


def check_skew(A, tol: float = TOL_ORTH) -> np.ndarray:
    A = _mat(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {A.shape}")
    if float(np.linalg.norm(A + A.T)) > _scaled_tol(tol, A):
        raise NotSkew("matrix is not skew-symmetric")
    return A


def projector(S) -> np.ndarray:
    """The Grassmann point ``P = S S^T`` spanned by the columns of ``S``."""
    S = _mat(S)
    return S @ S.T


def reflector(S) -> np.ndarray:
    """The symmetric involution ``I - 2 S S^T``."""
    S = _mat(S)
    return np.eye(S.shape[0]) - 2.0 * (S @ S.T)


def in_so_p(X, P, tol: float = TOL_ORTH) -> bool:
    """Whether ``X`` is skew and satisfies ``XP + PX = X``."""
    X, P = _mat(X), _mat(P)
    return is_skew(X, _scaled_tol(tol, X)) and float(
        np.linalg.norm(X @ P + P @ X - X)
    ) <= _scaled_tol(tol, X)


def tangent_defect(S, V) -> float:
    """Frobenius norm of ``V^T S + S^T V``."""
    S, V = _mat(S), _mat(V)
    M = V.T @ S
    return float(np.linalg.norm(M + M.T))


def check_tangent(S, V, tol: float = TOL_ORTH) -> np.ndarray:
    S, V = _mat(S), _mat(V)
    if V.shape != S.shape:
        raise DimensionMismatch(f"tangent shape {V.shape} does not match base {S.shape}")
    if tangent_defect(S, V) > _scaled_tol(tol, V):
        raise NotTangent("V^T S + S^T V != 0")
    return V


def project_tangent(S, Z) -> np.ndarray:
    """Orthogonal projection of an ambient ``n x k`` matrix onto ``T_S St(n, k)``."""
    S, Z = _mat(S), _mat(Z)
    M = S.T @ Z
    return Z - 0.5 * S @ (M + M.T)


@dataclass(frozen=True)
class StiefelPoint:
    """An ``n x k`` matrix with orthonormal columns."""

    S: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "S", check_stiefel(np.array(self.S, dtype=float)))

    @property
    def n(self) -> int:
        return self.S.shape[0]

    @property
    def k(self) -> int:
        return self.S.shape[1]

    @property
    def projector(self) -> GrassmannProjector:
        return GrassmannProjector(projector(self.S))


@dataclass(frozen=True)
class GrassmannProjector:
    """Symmetric idempotent ``n x n`` matrix of rank ``k``."""

    P: np.ndarray

    def __post_init__(self):
        P = np.array(self.P, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got {P.shape}")
        if (
            np.linalg.norm(P - P.T) > TOL_ORTH
            or np.linalg.norm(P @ P - P) > TOL_ORTH
            or abs(np.trace(P) - round(np.trace(P))) > TOL_ORTH
        ):
            raise NotOrthogonal("not an orthogonal projector")
        object.__setattr__(self, "P", P)

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.P)))


@dataclass(frozen=True)
class SkewMatrix:
    A: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A", check_skew(np.array(self.A, dtype=float)))


@dataclass(frozen=True)
class TangentVector:
    """A tangent vector ``V`` together with its base point."""

    V: np.ndarray
    base: StiefelPoint

    def __post_init__(self):
        base = self.base if isinstance(self.base, StiefelPoint) else StiefelPoint(self.base)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "V", check_tangent(base.S, np.array(self.V, dtype=float)))


@dataclass(frozen=True)
class TangentDecomposition:
    """The pair ``(X, Omega)`` with ``V = X S + S Omega``."""

    X: np.ndarray
    Omega: np.ndarray

    def __iter__(self):
        yield self.X
        yield self.Omega


def expm_skew(A) -> np.ndarray:
    """Matrix exponential of a skew-symmetric matrix (an element of SO(m))."""
    A = _mat(A)
    m = A.shape[0]
    if m == 1:
        return np.ones((1, 1))
    if m == 2:
        c, s = math.cos(A[1, 0]), math.sin(A[1, 0])
        return np.array([[c, -s], [s, c]])
    return scipy.linalg.expm(A)


def logm_orthogonal(Q, where: str | None = None) -> np.ndarray:
    """Principal logarithm of a rotation matrix.

    Uses the real Schur form, which for an orthogonal matrix is block diagonal
    with ``1 x 1`` blocks equal to ``+-1`` and ``2 x 2`` planar rotations.

    Raises:
        NotOrthogonal: if ``Q^T Q`` deviates from the identity by more than 1e-8.
        PrincipalLogUndefined: if an eigenvalue lies within ``EPS_LOG`` of -1
            (this includes every ``Q`` with determinant -1).
    """
    Q = _mat(Q)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {Q.shape}")
    m = Q.shape[0]
    err = float(np.linalg.norm(Q.T @ Q - np.eye(m)))
    if err > TOL_LOG_ORTH:
        raise NotOrthogonal(f"matrix is not orthogonal (|Q^T Q - I| = {err:.3e})")
    label = f" in {where}" if where else ""
    if m == 1:
        if Q[0, 0] < 0:
            raise PrincipalLogUndefined(f"eigenvalue -1{label}", where=where)
        return np.zeros((1, 1))
    if m == 2:
        angle = math.atan2(0.5 * (Q[1, 0] - Q[0, 1]), 0.5 * (Q[0, 0] + Q[1, 1]))
        if math.hypot(0.5 * (Q[0, 0] + Q[1, 1]) + 1.0, math.sin(angle)) < EPS_LOG or (
            np.linalg.det(Q) < 0
        ):
            raise PrincipalLogUndefined(f"eigenvalue near -1{label}", where=where)
        return np.array([[0.0, -angle], [angle, 0.0]])

    T, Z = scipy.linalg.schur(Q, output="real")
    L = np.zeros_like(T)
    i = 0
    while i < m:
        if i + 1 < m and T[i + 1, i] != 0.0:
            a = 0.5 * (T[i, i] + T[i + 1, i + 1])
            s = 0.5 * (T[i + 1, i] - T[i, i + 1])
            if math.hypot(a + 1.0, s) < EPS_LOG:
                raise PrincipalLogUndefined(f"eigenvalue near -1{label}", where=where)
            angle = math.atan2(s, a)
            L[i + 1, i] = angle
            L[i, i + 1] = -angle
            i += 2
        else:
            if T[i, i] + 1.0 < EPS_LOG:
                raise PrincipalLogUndefined(f"eigenvalue near -1{label}", where=where)
            i += 1
    A = Z @ L @ Z.T
    return 0.5 * (A - A.T)


def _decompose(S: np.ndarray, V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    SVt = S @ V.T
    X = SVt.T - SVt + 2.0 * S @ (V.T @ S) @ S.T
    return 0.5 * (X - X.T), S.T @ V


def tangent_decompose(S, V) -> TangentDecomposition:
    """Split ``V`` into ``X = V S^T - S V^T + 2 S V^T S S^T`` and ``Omega = S^T V``."""
    S = check_stiefel(S)
    V = check_tangent(S, V)
    X, Om = _decompose(S, V)
    return TangentDecomposition(X, 0.5 * (Om - Om.T))


def tangent_compose(S, d) -> np.ndarray:
    """``V = X S + S Omega``."""
    S = _mat(S)
    X, Om = (_mat(a) for a in d)
    n, k = S.shape
    if X.shape != (n, n) or Om.shape != (k, k):
        raise DimensionMismatch(
            f"generators of shape {X.shape}, {Om.shape} do not fit a base of shape {S.shape}"
        )
    return X @ S + S @ Om


def canonical_inner(S, V1, V2) -> float:
    """Canonical metric ``tr(V1^T (I - S S^T / 2) V2)``."""
    S = check_stiefel(S)
    V1 = check_tangent(S, V1)
    V2 = check_tangent(S, V2)
    return float(np.sum(V1 * V2) - 0.5 * np.sum((S.T @ V1) * (S.T @ V2)))


def canonical_norm(S, V) -> float:
    return math.sqrt(max(canonical_inner(S, V, V), 0.0))


def random_stiefel(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed point of St(n, k)."""
    Q, R = np.linalg.qr(rng.standard_normal((n, k)))
    return Q * np.sign(np.diag(R))


def random_tangent(S, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random tangent vector at ``S`` with Frobenius norm ``scale``."""
    S = _mat(S)
    V = project_tangent(S, rng.standard_normal(S.shape))
    nrm = np.linalg.norm(V)
    return V * (scale / nrm) if nrm > 0 else V


def random_skew(m: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random skew matrix with spectral norm ``scale``."""
    B = rng.standard_normal((m, m))
    A = B - B.T
    nrm = np.linalg.norm(A, 2)
    return A * (scale / nrm) if nrm > 0 else A
