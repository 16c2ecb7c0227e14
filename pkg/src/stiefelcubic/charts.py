"""Charts on St(3,1) and St(3,2) and the cubic-polynomial Hamiltonians.

Phase states live on ``T*(TQ)`` and are stored as flat vectors
``z = (q, qdot, p_q, p_qdot)`` of length ``4m``. The Hamiltonian is

    H = p_q . qdot + p_qdot . a(q, qdot) + 1/2 p_qdot^T G(q)^{-1} p_qdot

where ``a`` is the geodesic spray of the chart metric ``G`` (pulled back from
the canonical metric). :meth:`ChartModel.hamiltonian` evaluates the printed
closed-form expression verbatim; :meth:`ChartModel.hamiltonian_structured`
evaluates the decomposition above. The gradients are hand-derived from the
decomposition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from .errors import ChartOutOfBounds, DimensionMismatch, NonFinite

EPS_CHART = 1e-6
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ChartPhaseState:
    """A point of ``T*(TQ)`` in chart coordinates."""

    q: np.ndarray
    qdot: np.ndarray
    p_q: np.ndarray
    p_qdot: np.ndarray

    def __post_init__(self):
        parts = [np.atleast_1d(np.asarray(a, dtype=float)) for a in (self.q, self.qdot, self.p_q, self.p_qdot)]
        m = len(parts[0])
        if any(len(a) != m for a in parts):
            raise DimensionMismatch("all four blocks must have the same length")
        if not all(np.all(np.isfinite(a)) for a in parts):
            raise NonFinite("phase state has non-finite entries")
        for name, a in zip(("q", "qdot", "p_q", "p_qdot"), parts):
            object.__setattr__(self, name, a)

    @property
    def m(self) -> int:
        return len(self.q)

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.q, self.qdot, self.p_q, self.p_qdot])

    @classmethod
    def from_vector(cls, z) -> ChartPhaseState:
        z = np.asarray(z, dtype=float)
        if z.ndim != 1 or len(z) % 4:
            raise DimensionMismatch(f"phase vector length must be a multiple of 4, got {z.shape}")
        return cls(*np.split(z, 4))


def as_vector(s) -> np.ndarray:
    if isinstance(s, ChartPhaseState):
        return s.vector
    return np.asarray(s, dtype=float)


class ChartModel:
    """Chart, embedding and Hamiltonian of one manifold.

    Subclasses supply the embedding and its Jacobian, the printed
    Hamiltonian, the metric and the spray with their derivatives.
    Instances also satisfy the Hamiltonian-system interface used by the
    integrators (``dim``, ``hamiltonian``, ``gradient``, ``vector_field``,
    ``check_state``).
    """

    name: ClassVar[str]
    m: ClassVar[int]
    shape: ClassVar[tuple[int, int]]
    diameter: ClassVar[float]

    @property
    def dim(self) -> int:
        return 4 * self.m

    # -- chart ---------------------------------------------------------------

    def check_point(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        if q.shape != (self.m,):
            raise DimensionMismatch(f"{self.name} chart point needs {self.m} coordinates, got {q.shape}")
        self._check_coords(q.tolist())
        return q

    def _check_coords(self, coords: list[float]) -> None:
        th = coords[0]
        if not (EPS_CHART < th < math.pi - EPS_CHART):
            raise ChartOutOfBounds(f"theta={th!r} outside (0, pi)")
        for angle in coords[1:]:
            if not (EPS_CHART < angle < TWO_PI - EPS_CHART):
                raise ChartOutOfBounds(f"angle {angle!r} outside (0, 2 pi)")

    def check_state(self, z) -> np.ndarray:
        z = as_vector(z)
        if z.shape != (self.dim,):
            raise DimensionMismatch(f"{self.name} phase state needs {self.dim} entries, got {z.shape}")
        if not np.isfinite(z).all():
            raise NonFinite("phase state has non-finite entries")
        self._check_coords(z[: self.m].tolist())
        return z

    def embed(self, q) -> np.ndarray:
        return self._embed(self.check_point(q))

    def embed_jacobian(self, q) -> np.ndarray:
        """Partial derivatives of the embedding, shape ``(m, n, k)``."""
        return self._embed_jacobian(self.check_point(q))

    def pushforward(self, q, qdot) -> np.ndarray:
        """Tangent vector ``sum_i qdot_i d(embed)/dq_i`` at ``embed(q)``."""
        J = self.embed_jacobian(q)
        qdot = np.asarray(qdot, dtype=float)
        if qdot.shape != (self.m,):
            raise DimensionMismatch(f"velocity needs {self.m} entries, got {qdot.shape}")
        return np.tensordot(qdot, J, axes=1)

    # -- Hamiltonian ---------------------------------------------------------

    def hamiltonian(self, s) -> float:
        """The printed closed-form Hamiltonian."""
        z = self.check_state(s)
        value = self._h_printed(*z)
        if not math.isfinite(value):
            raise NonFinite(f"H evaluated to {value}")
        return value

    def hamiltonian_structured(self, s) -> float:
        z = self.check_state(s)
        q, v, pq, pv = np.split(z, 4)
        value = float(pq @ v + pv @ self.spray(q, v) + 0.5 * pv @ self.inverse_metric(q) @ pv)
        if not math.isfinite(value):
            raise NonFinite(f"H evaluated to {value}")
        return value

    def gradient(self, s) -> np.ndarray:
        """``(dH/dq, dH/dqdot, dH/dp_q, dH/dp_qdot)`` in closed form."""
        z = self.check_state(s)
        g = np.array(self._gradient(*z.tolist()))
        if not np.isfinite(g).all():
            raise NonFinite("gradient has non-finite entries")
        return g

    def vector_field(self, s) -> np.ndarray:
        """Hamiltonian vector field ``(dH/dp_q, dH/dp_qdot, -dH/dq, -dH/dqdot)``."""
        g = self.gradient(s)
        h = self.dim // 2
        return np.concatenate([g[h:], -g[:h]])

    def momenta_for_acceleration(self, q, qdot, qddot) -> np.ndarray:
        """``p_qdot`` with ``dH/dp_qdot = qddot``: ``G(q) (qddot - a(q, qdot))``."""
        q = self.check_point(q)
        v = np.asarray(qdot, dtype=float)
        return self.metric(q) @ (np.asarray(qddot, dtype=float) - self.spray(q, v))

    # subclass hooks
    def _embed(self, q): raise NotImplementedError
    def _embed_jacobian(self, q): raise NotImplementedError
    def _h_printed(self, *z): raise NotImplementedError
    def metric(self, q): raise NotImplementedError
    def inverse_metric(self, q): raise NotImplementedError
    def spray(self, q, v): raise NotImplementedError
    def _gradient(self, *z) -> list[float]: raise NotImplementedError


class Sphere(ChartModel):
    """St(3,1) = S^2 with spherical coordinates ``(theta, phi)``."""

    name = "sphere"
    m = 2
    shape = (3, 1)
    diameter = 2.0

    def _embed(self, q):
        th, ph = q
        return np.array([[math.cos(ph) * math.sin(th)], [math.sin(ph) * math.sin(th)], [math.cos(th)]])

    def _embed_jacobian(self, q):
        th, ph = q
        st, ct, sp, cp = math.sin(th), math.cos(th), math.sin(ph), math.cos(ph)
        return np.array(
            [
                [[cp * ct], [sp * ct], [-st]],
                [[-sp * st], [cp * st], [0.0]],
            ]
        )

    def _h_printed(self, th, ph, thd, phd, p_th, p_ph, p_thd, p_phd):
        return (
            0.5 * phd**2 * p_thd * math.sin(2 * th)
            + phd * p_ph
            + thd * p_th
            + 0.5 * p_thd**2
            + (-phd * thd * p_phd * math.sin(2 * th) + 0.5 * p_phd**2) / math.sin(th) ** 2
        )

    def metric(self, q):
        return np.diag([1.0, math.sin(q[0]) ** 2])

    def inverse_metric(self, q):
        return np.diag([1.0, 1.0 / math.sin(q[0]) ** 2])

    def spray(self, q, v):
        th = q[0]
        thd, phd = v
        s, c = math.sin(th), math.cos(th)
        return np.array([s * c * phd**2, -2.0 * c / s * thd * phd])

    def _gradient(self, th, ph, thd, phd, p_th, p_ph, p_thd, p_phd):
        s, c = math.sin(th), math.cos(th)
        s2 = s * s
        cot = c / s
        return [
            p_thd * math.cos(2 * th) * phd**2 + 2.0 * p_phd * thd * phd / s2 - p_phd**2 * c / (s2 * s),
            0.0,
            p_th - 2.0 * cot * phd * p_phd,
            p_ph + math.sin(2 * th) * phd * p_thd - 2.0 * cot * thd * p_phd,
            thd,
            phd,
            s * c * phd**2 + p_thd,
            -2.0 * cot * thd * phd + p_phd / s2,
        ]


class St32(ChartModel):
    """St(3,2) with the Euler-angle chart ``(theta, phi, psi)``.

    The first column of the embedded frame is the sphere point
    ``(theta, phi)``; the second column rotates by ``psi`` inside its tangent
    plane. The printed Hamiltonian divides by ``cos(theta)``, so a band of
    width ``EPS_CHART`` around ``theta = pi/2`` is excluded.
    """

    name = "st32"
    m = 3
    shape = (3, 2)
    diameter = 2.0 * math.sqrt(2.0)

    def _check_coords(self, coords):
        super()._check_coords(coords)
        if abs(coords[0] - 0.5 * math.pi) <= EPS_CHART:
            raise ChartOutOfBounds(f"theta={coords[0]!r} too close to pi/2")

    def _embed(self, q):
        th, ph, ps = q
        st, ct, sp, cp, ss, cs = (math.sin(th), math.cos(th), math.sin(ph), math.cos(ph), math.sin(ps), math.cos(ps))
        return np.array(
            [
                [cp * st, -sp * ss + cp * cs * ct],
                [sp * st, sp * cs * ct + ss * cp],
                [ct, -st * cs],
            ]
        )

    def _embed_jacobian(self, q):
        th, ph, ps = q
        st, ct, sp, cp, ss, cs = (math.sin(th), math.cos(th), math.sin(ph), math.cos(ph), math.sin(ps), math.cos(ps))
        d_th = [[cp * ct, -cp * cs * st], [sp * ct, -sp * cs * st], [-st, -ct * cs]]
        d_ph = [[-sp * st, -cp * ss - sp * cs * ct], [cp * st, cp * cs * ct - ss * sp], [0.0, 0.0]]
        d_ps = [[0.0, -sp * cs - cp * ss * ct], [0.0, -sp * ss * ct + cs * cp], [0.0, st * ss]]
        return np.array([d_th, d_ph, d_ps])

    def _h_printed(self, th, ph, ps, thd, phd, psd, p_th, p_ph, p_ps, p_thd, p_phd, p_psd):
        sin, cos, tan = math.sin, math.cos, math.tan
        s4 = sin(th) ** 4
        w = sin(th) ** 6 * tan(th) ** 2
        first = (
            (1 - cos(2 * th)) ** 3
            * (
                -1 / 8 * phd * thd * p_phd * sin(2 * th)
                + 1 / 4 * phd * thd * p_psd * sin(th)
                + 1 / 4 * psd * thd * p_phd * sin(th)
                - 1 / 8 * psd * thd * p_psd * sin(2 * th)
                + 1 / 4 * p_phd**2
                - 1 / 2 * p_phd * p_psd * cos(th)
                + 1 / 4 * p_psd**2
            )
            / (cos(2 * th) + 1)
        )
        second = (
            -1 / 2 * (-p_phd + p_psd / cos(th)) ** 2 * s4
            - 1 / 2 * (-p_phd / cos(th) + p_psd) ** 2 * s4
            + (p_phd**2 - p_phd * p_psd * cos(th) - p_phd * p_psd / cos(th) + p_psd**2) * s4
        )
        third = (
            phd * p_ph + psd * p_ps + thd * p_th - 1 / 2 * p_thd**2 - p_thd * (phd * psd * sin(th) - p_thd)
        ) * w
        return (first + second + third) / w

    def metric(self, q):
        c = math.cos(q[0])
        return np.array([[1.0, 0.0, 0.0], [0.0, 1.0, c], [0.0, c, 1.0]])

    def inverse_metric(self, q):
        s, c = math.sin(q[0]), math.cos(q[0])
        r = 1.0 / s**2
        return np.array([[1.0, 0.0, 0.0], [0.0, r, -c * r], [0.0, -c * r, r]])

    def spray(self, q, v):
        s, c = math.sin(q[0]), math.cos(q[0])
        thd, phd, psd = v
        return np.array([-s * phd * psd, thd * (psd - c * phd) / s, thd * (phd - c * psd) / s])

    def _gradient(self, th, ph, ps, thd, phd, psd, p_th, p_ph, p_ps, p_thd, p_phd, p_psd):
        s, c = math.sin(th), math.cos(th)
        s2 = s * s
        s3 = s2 * s
        return [
            -c * phd * psd * p_thd
            + thd * (phd - c * psd) / s2 * p_phd
            + thd * (psd - c * phd) / s2 * p_psd
            - c / s3 * (p_phd**2 + p_psd**2)
            + (1.0 + c * c) / s3 * p_phd * p_psd,
            0.0,
            0.0,
            p_th + (psd - c * phd) / s * p_phd + (phd - c * psd) / s * p_psd,
            p_ph - s * psd * p_thd - c * thd / s * p_phd + thd / s * p_psd,
            p_ps - s * phd * p_thd + thd / s * p_phd - c * thd / s * p_psd,
            thd,
            phd,
            psd,
            -s * phd * psd + p_thd,
            thd * (psd - c * phd) / s + (p_phd - c * p_psd) / s2,
            thd * (phd - c * psd) / s + (p_psd - c * p_phd) / s2,
        ]


SPHERE = Sphere()
ST32 = St32()
MODELS: dict[str, ChartModel] = {SPHERE.name: SPHERE, ST32.name: ST32}


def get_model(manifold: str | ChartModel) -> ChartModel:
    if isinstance(manifold, ChartModel):
        return manifold
    try:
        return MODELS[manifold]
    except KeyError:
        raise ValueError(f"unknown manifold {manifold!r}; expected one of {sorted(MODELS)}") from None


# -- functional interface --------------------------------------------------


def sphere_embed(q) -> np.ndarray:
    return SPHERE.embed(q)


def st32_embed(q) -> np.ndarray:
    return ST32.embed(q)


def chart_pushforward(manifold, q, qdot) -> np.ndarray:
    return get_model(manifold).pushforward(q, qdot)


def hamiltonian(manifold, s) -> float:
    return get_model(manifold).hamiltonian(s)


def hamiltonian_gradient(manifold, s) -> np.ndarray:
    return get_model(manifold).gradient(s)


def hamiltonian_vector_field(manifold, s) -> np.ndarray:
    return get_model(manifold).vector_field(s)
