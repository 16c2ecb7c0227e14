"""Time-indexed trajectories shared by the generators and the harness."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matcore import TOL_ORTH, orthonormality_defect


@dataclass
class TrajectoryRecord:
    """Samples of a curve on St(n, k).

    Attributes:
        times: increasing sample times, shape ``(L,)``.
        points: embedded matrices, shape ``(L, n, k)``; ``None`` for systems
            without an embedding (test Hamiltonians).
        method: tag of the generating method (``gcp``, ``rk4``, ...).
        h: nominal step size (``nan`` when not meaningful).
        N: number of steps (``L - 1`` for integrators).
        states: optional chart phase states, shape ``(L, 4m)``.
        manifold: ``sphere`` / ``st32`` or ``None`` for chart-free curves.
        extras: named per-sample arrays (e.g. accelerations and jerks).
        meta: run metadata (wall-clock runtime, configuration, ...).
    """

    times: np.ndarray
    points: np.ndarray | None
    method: str
    h: float
    N: int
    states: np.ndarray | None = None
    manifold: str | None = None
    extras: dict[str, np.ndarray] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.points is not None:
            self.points = np.asarray(self.points, dtype=float)
            if self.points.ndim != 3 or len(self.points) != len(self.times):
                raise ValueError("points must have shape (len(times), n, k)")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.times)

    def max_orthonormality_defect(self) -> float:
        if self.points is None:
            return 0.0
        return max((orthonormality_defect(P) for P in self.points), default=0.0)

    def check_orthonormal(self, tol: float = TOL_ORTH) -> bool:
        return self.max_orthonormality_defect() <= tol
