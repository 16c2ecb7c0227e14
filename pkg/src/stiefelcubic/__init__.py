"""Riemannian cubic polynomials on Stiefel manifolds.

Two generators are provided: the adjusted de Casteljau construction built on
quasi-geodesics (:mod:`.decasteljau`) and symplectic integrators derived from
discretization maps (:mod:`.symplectic`), plus a harness that benchmarks both
against an RK4 reference (:mod:`.harness`).
"""

from .charts import SPHERE, ST32, ChartPhaseState, get_model
from .decasteljau import CubicBoundaryData, CubicCurve, build_cubic, eval_cubic, sample_cubic
from .errors import (
    ChartOutOfBounds,
    GridMismatch,
    NewtonDivergence,
    NotOrthogonal,
    NotTangent,
    PrincipalLogUndefined,
    ShootingDivergence,
    StiefelError,
)
from .matcore import canonical_inner, expm_skew, logm_orthogonal, tangent_compose, tangent_decompose
from .quasigeo import QuasiGeodesic, connect, quasi_geodesic_eval, retraction
from .symplectic import DiscretizationScheme, integrate_ivp, rk4_reference, shoot_bvp, step

__version__ = "0.1.0"

__all__ = [
    "SPHERE",
    "ST32",
    "ChartOutOfBounds",
    "ChartPhaseState",
    "CubicBoundaryData",
    "CubicCurve",
    "DiscretizationScheme",
    "GridMismatch",
    "NewtonDivergence",
    "NotOrthogonal",
    "NotTangent",
    "PrincipalLogUndefined",
    "QuasiGeodesic",
    "ShootingDivergence",
    "StiefelError",
    "build_cubic",
    "canonical_inner",
    "connect",
    "eval_cubic",
    "expm_skew",
    "get_model",
    "integrate_ivp",
    "logm_orthogonal",
    "quasi_geodesic_eval",
    "retraction",
    "rk4_reference",
    "sample_cubic",
    "shoot_bvp",
    "step",
    "tangent_compose",
    "tangent_decompose",
]
