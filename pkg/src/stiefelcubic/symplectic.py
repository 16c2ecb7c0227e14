"""Symplectic integrators from discretization maps, RK4 and shooting.

A Hamiltonian system is any object exposing ``dim`` (even), ``vector_field(z)``
and ``check_state(z)``; :class:`~stiefelcubic.charts.ChartModel` instances
additionally provide ``embed`` so trajectories can be mapped to St(n, k).
States are flat vectors ``z = (Q, P)`` with ``Q`` the full chart-tangent
coordinate ``(q, qdot)`` and ``P = (p_q, p_qdot)`` its conjugate momenta.

The one-step map of a discretization scheme solves

    displacement(z0, z1) = h * X_H(base(z0, z1))

where ``(base, displacement)`` invert the cotangent lift of the
discretization map:

* initial point: ``base = (Q0, P1)``, displacement ``z1 - z0``
  (the semi-implicit symplectic Euler method);
* midpoint: ``base = (z0 + z1) / 2``, displacement ``z1 - z0``.
"""

from __future__ import annotations

import enum
import logging
from typing import Protocol

import numpy as np

from .charts import ChartModel, as_vector, get_model
from .errors import (
    ChartOutOfBounds,
    DimensionMismatch,
    NewtonDivergence,
    NonFinite,
    ShootingDivergence,
    StiefelError,
)
from .trajectory import TrajectoryRecord

log = logging.getLogger(__name__)

TOL_NEWTON = 1e-12
TOL_SHOOT = 1e-8
NEWTON_MAX_ITER = 50
SHOOT_MAX_ITER = 100
MAX_HALVINGS = 30
JAC_STEP = 1e-7
SHOOT_JAC_STEP = 1e-6
H_REF = 1e-4


class HamiltonianSystem(Protocol):
    dim: int

    def vector_field(self, z: np.ndarray) -> np.ndarray: ...

    def check_state(self, z) -> np.ndarray: ...


class DiscretizationScheme(str, enum.Enum):
    INITIAL_POINT = "initial-point"
    MIDPOINT = "midpoint"


def _scheme(scheme) -> DiscretizationScheme:
    return DiscretizationScheme(scheme)


def _system(manifold) -> HamiltonianSystem:
    if isinstance(manifold, str):
        return get_model(manifold)
    return manifold


def lift_relations(scheme, z0, z1) -> tuple[np.ndarray, np.ndarray]:
    """Invert the cotangent lift: ``(z0, z1) -> (base, displacement)``."""
    scheme = _scheme(scheme)
    z0, z1 = as_vector(z0), as_vector(z1)
    if z0.shape != z1.shape or z0.ndim != 1 or len(z0) % 2:
        raise DimensionMismatch(f"incompatible phase points {z0.shape} and {z1.shape}")
    disp = z1 - z0
    if scheme is DiscretizationScheme.MIDPOINT:
        return 0.5 * (z0 + z1), disp
    half = len(z0) // 2
    return np.concatenate([z0[:half], z1[half:]]), disp


def vector_field_jacobian(system: HamiltonianSystem, z: np.ndarray, step: float = JAC_STEP) -> np.ndarray:
    """Central-difference Jacobian of ``X_H`` at ``z``."""
    d = len(z)
    J = np.empty((d, d))
    for i in range(d):
        e = np.zeros(d)
        e[i] = step
        J[:, i] = (system.vector_field(z + e) - system.vector_field(z - e)) / (2 * step)
    return J


def _residual(system, scheme, h, z0, z1):
    base, disp = lift_relations(scheme, z0, z1)
    return disp - h * system.vector_field(base)


def _safe_residual(system, scheme, h, z0, z1):
    try:
        r = _residual(system, scheme, h, z0, z1)
    except (ChartOutOfBounds, NonFinite, ZeroDivisionError, OverflowError):
        return None
    return r if np.all(np.isfinite(r)) else None


def _base_derivative(scheme: DiscretizationScheme, d: int) -> np.ndarray:
    if scheme is DiscretizationScheme.MIDPOINT:
        return 0.5 * np.eye(d)
    return np.diag(np.r_[np.zeros(d // 2), np.ones(d // 2)])


def step(scheme, manifold, h: float, s0, tol: float = TOL_NEWTON) -> np.ndarray:
    """One step of the symplectic scheme from ``s0``; returns the new state.

    Damped Newton on the step residual with a finite-difference Jacobian of
    ``X_H``. The Jacobian is reused while the iteration contracts and
    refreshed otherwise. Once the residual is below ``tol`` one polishing
    iteration is made so that the returned state is accurate to round-off.

    Raises:
        ChartOutOfBounds: if ``s0`` is outside the chart.
        NewtonDivergence: after ``NEWTON_MAX_ITER`` iterations, or when no
            damped update stays inside the chart.
    """
    scheme = _scheme(scheme)
    system = _system(manifold)
    if h == 0:
        raise ValueError("step size must be nonzero")
    z0 = system.check_state(as_vector(s0)).copy()
    d = len(z0)
    dbase = _base_derivative(scheme, d)

    z = z0 + h * system.vector_field(z0)
    r = _safe_residual(system, scheme, h, z0, z)
    if r is None:
        z = z0.copy()
        r = _residual(system, scheme, h, z0, z)
    jac = None
    fresh = False
    for _ in range(NEWTON_MAX_ITER):
        rnorm = float(np.max(np.abs(r)))
        if jac is None:
            base, _ = lift_relations(scheme, z0, z)
            try:
                jac = np.eye(d) - h * vector_field_jacobian(system, base) @ dbase
            except (ChartOutOfBounds, NonFinite) as exc:
                raise NewtonDivergence(f"Jacobian evaluation left the chart: {exc}") from exc
            fresh = True
        delta = np.linalg.solve(jac, -r)
        lam = 1.0
        for _ in range(MAX_HALVINGS + 1):
            r_trial = _safe_residual(system, scheme, h, z0, z + lam * delta)
            if r_trial is not None and np.max(np.abs(r_trial)) < rnorm:
                break
            lam *= 0.5
        else:
            if rnorm <= tol:
                return z
            if not fresh:
                jac = None
                continue
            raise NewtonDivergence(f"no damped Newton update reduces the residual ({rnorm:.3e})")
        z, r = z + lam * delta, r_trial
        if rnorm <= tol:
            # the update just taken was the polishing iteration
            return z
        if np.max(np.abs(r)) > 0.25 * rnorm:
            jac = None
        else:
            fresh = False
    if np.max(np.abs(r)) > tol:
        raise NewtonDivergence(
            f"Newton did not converge in {NEWTON_MAX_ITER} iterations (residual {np.max(np.abs(r)):.3e})"
        )
    return z


def _embed_states(system, states: np.ndarray):
    if not isinstance(system, ChartModel):
        return None
    return np.array([system.embed(z[: system.m]) for z in states])


def _record(system, states, h, method, extras=None) -> TrajectoryRecord:
    states = np.asarray(states)
    N = len(states) - 1
    return TrajectoryRecord(
        times=np.arange(N + 1) * h,
        points=_embed_states(system, states),
        method=method,
        h=h,
        N=N,
        states=states,
        manifold=getattr(system, "name", None),
        extras=extras or {},
    )


def integrate_states(scheme, manifold, h: float, N: int, s0) -> np.ndarray:
    """States after ``0 .. N`` steps, shape ``(N + 1, dim)``."""
    system = _system(manifold)
    if N < 0:
        raise ValueError("N must be non-negative")
    z = system.check_state(as_vector(s0))
    out = np.empty((N + 1, len(z)))
    out[0] = z
    for i in range(N):
        try:
            z = step(scheme, system, h, z)
        except StiefelError as exc:
            exc.step_index = i
            exc.args = (f"step {i}: {exc}",)
            raise
        out[i + 1] = z
    return out


def integrate_ivp(scheme, manifold, h: float, N: int, s0) -> TrajectoryRecord:
    """Apply :func:`step` ``N`` times and record every state and its embedding."""
    system = _system(manifold)
    states = integrate_states(scheme, system, h, N, s0)
    return _record(system, states, h, _scheme(scheme).value)


def rk4_states(manifold, h: float, N: int, s0) -> np.ndarray:
    system = _system(manifold)
    f = system.vector_field
    z = system.check_state(as_vector(s0))
    out = np.empty((N + 1, len(z)))
    out[0] = z
    for i in range(N):
        k1 = f(z)
        k2 = f(z + 0.5 * h * k1)
        k3 = f(z + 0.5 * h * k2)
        k4 = f(z + h * k3)
        z = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = z
    return out


def acceleration(system: HamiltonianSystem, z) -> np.ndarray:
    """Second derivative of the configuration ``q`` along the flow."""
    m = system.dim // 4
    return system.vector_field(as_vector(z))[m : 2 * m]


def jerk(system: HamiltonianSystem, z, eps: float = 1e-3) -> np.ndarray:
    """Third derivative of ``q`` along the flow.

    Directional derivative of the ``qddot`` slot of ``X_H`` along ``X_H``
    itself, by a fourth-order central stencil.
    """
    z = as_vector(z)
    m = system.dim // 4
    v = system.vector_field(z)
    step_ = eps / max(1.0, float(np.max(np.abs(v))))

    def slot(k):
        return system.vector_field(z + k * step_ * v)[m : 2 * m]

    return (-slot(2) + 8 * slot(1) - 8 * slot(-1) + slot(-2)) / (12 * step_)


def rk4_reference(manifold, h: float, N: int, s0) -> TrajectoryRecord:
    """Classical RK4 on ``zdot = X_H(z)``.

    The record carries ``acceleration`` and ``jerk`` extras so that the
    full discrete jet ``(q, qdot, qddot, q3)`` is available at every sample.
    """
    system = _system(manifold)
    states = rk4_states(system, h, N, s0)
    extras = {}
    if system.dim % 4 == 0:
        extras = {
            "acceleration": np.array([acceleration(system, z) for z in states]),
            "jerk": np.array([jerk(system, z) for z in states]),
        }
    return _record(system, states, h, "rk4", extras)


def momenta_from_jet(manifold, q, qdot, qddot, q3, tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Momenta ``(p_q, p_qdot)`` whose flow has the given acceleration and jerk.

    ``p_qdot`` follows in closed form from ``qddot = dH/dp_qdot``; ``p_q`` is
    found by Newton iteration on the jerk condition.
    """
    model = get_model(manifold)
    m = model.m
    q = model.check_point(q)
    qdot, qddot, q3 = (np.asarray(a, dtype=float) for a in (qdot, qddot, q3))
    p_v = model.momenta_for_acceleration(q, qdot, qddot)

    def jerk_residual(p_q):
        return jerk(model, np.concatenate([q, qdot, p_q, p_v])) - q3

    p_q = np.zeros(m)
    r = jerk_residual(p_q)
    for _ in range(NEWTON_MAX_ITER):
        if np.max(np.abs(r)) <= tol:
            return p_q, p_v
        J = np.empty((m, m))
        for i in range(m):
            e = np.zeros(m)
            e[i] = 1e-4
            J[:, i] = (jerk_residual(p_q + e) - jerk_residual(p_q - e)) / 2e-4
        p_q = p_q - np.linalg.solve(J, r)
        r = jerk_residual(p_q)
    if np.max(np.abs(r)) <= 10 * tol:
        return p_q, p_v
    raise NewtonDivergence(f"jerk condition not met (residual {np.max(np.abs(r)):.3e})")


def _terminal(scheme, system, h, N, z0):
    zN = integrate_states(scheme, system, h, N, z0)[-1]
    return zN[: system.dim // 2]


def shoot_bvp(
    scheme,
    manifold,
    h: float,
    N: int,
    q0,
    qdot0,
    qN_target,
    qdotN_target,
    p_guess=None,
    tol: float = TOL_SHOOT,
) -> TrajectoryRecord:
    """Find initial momenta so that ``N`` steps land on ``(qN_target, qdotN_target)``.

    Damped Newton over the ``2m`` initial momenta with a forward-difference
    Jacobian. Trial momenta whose integration fails are treated as
    non-improving and trigger step halving.

    Raises:
        ShootingDivergence: after ``SHOOT_MAX_ITER`` iterations or when
            damping cannot reduce the residual.
    """
    system = _system(manifold)
    half = system.dim // 2
    Q0 = np.concatenate([np.atleast_1d(q0), np.atleast_1d(qdot0)]).astype(float)
    target = np.concatenate([np.atleast_1d(qN_target), np.atleast_1d(qdotN_target)]).astype(float)
    if len(Q0) != half or len(target) != half:
        raise DimensionMismatch("boundary data does not match the phase-space dimension")
    p = np.zeros(half) if p_guess is None else np.asarray(p_guess, dtype=float).copy()

    def residual(p_):
        return _terminal(scheme, system, h, N, np.concatenate([Q0, p_])) - target

    r = residual(p)
    for it in range(SHOOT_MAX_ITER):
        rnorm = np.max(np.abs(r))
        log.debug("shooting iteration %d: residual %.3e", it, rnorm)
        if rnorm <= tol:
            break
        J = np.empty((half, half))
        for i in range(half):
            e = np.zeros(half)
            e[i] = SHOOT_JAC_STEP
            J[:, i] = (residual(p + e) - r) / SHOOT_JAC_STEP
        delta = np.linalg.lstsq(J, -r, rcond=None)[0]
        lam = 1.0
        for _ in range(MAX_HALVINGS + 1):
            try:
                r_trial = residual(p + lam * delta)
            except StiefelError:
                r_trial = None
            if r_trial is not None and np.max(np.abs(r_trial)) < rnorm:
                break
            lam *= 0.5
        else:
            raise ShootingDivergence(f"damping failed to reduce the residual ({rnorm:.3e})")
        p = p + lam * delta
        r = r_trial
    else:
        if np.max(np.abs(r)) > tol:
            raise ShootingDivergence(
                f"no convergence after {SHOOT_MAX_ITER} iterations (residual {np.max(np.abs(r)):.3e})"
            )
    rec = integrate_ivp(scheme, system, h, N, np.concatenate([Q0, p]))
    rec.extras["initial_momenta"] = p
    return rec
