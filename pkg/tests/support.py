"""Shared builders and reference systems for the test suite."""

from __future__ import annotations

import math

import numpy as np

from stiefelcubic.decasteljau import CubicBoundaryData
from stiefelcubic.matcore import random_stiefel, random_tangent
from stiefelcubic.quasigeo import retraction


class Oscillator:
    """H = (q^2 + p^2) / 2 in one degree of freedom."""

    dim = 2

    def vector_field(self, z):
        return np.array([z[1], -z[0]])

    def check_state(self, z):
        return np.asarray(z, dtype=float)


class Pendulum:
    """H = p^2 / 2 - cos q; nonlinear, so Newton actually iterates."""

    dim = 2

    def vector_field(self, z):
        return np.array([z[1], -math.sin(z[0])])

    def check_state(self, z):
        return np.asarray(z, dtype=float)


def random_boundary(n, k, rng, spread=0.6, speed=0.8) -> CubicBoundaryData:
    """Nearby endpoints with moderate velocities, so every logarithm exists."""
    S0 = random_stiefel(n, k, rng)
    S3 = retraction(S0, random_tangent(S0, rng, spread))
    return CubicBoundaryData(S0, S3, random_tangent(S0, rng, speed), random_tangent(S3, rng, speed))


def random_chart_state(model, rng, p_scale=0.3) -> np.ndarray:
    """Phase state away from chart singularities."""
    m = model.m
    if model.name == "sphere":
        q = [rng.uniform(0.6, math.pi - 0.6), rng.uniform(1.0, 2 * math.pi - 1.0)]
    else:
        th = rng.uniform(0.3, math.pi / 2 - 0.3)
        q = [th if rng.random() < 0.5 else math.pi - th, *rng.uniform(1.0, 2 * math.pi - 1.0, 2)]
    v = rng.uniform(-0.5, 0.5, m)
    p = rng.uniform(-p_scale, p_scale, 2 * m)
    return np.concatenate([q, v, p])


def slerp(a, b, t):
    """Great-circle interpolation between unit vectors."""
    a, b = np.ravel(a), np.ravel(b)
    w = math.acos(float(np.clip(a @ b, -1, 1)))
    if w < 1e-14:
        return a.copy()
    return (math.sin((1 - t) * w) * a + math.sin(t * w) * b) / math.sin(w)


def fd6(f, x, i, h=1e-3):
    """Sixth-order central difference of ``f`` along coordinate ``i``."""
    e = np.zeros_like(x)
    e[i] = h
    c = (1 / 60, -3 / 20, 3 / 4)
    return sum(ck * (f(x + (j + 1) * e) - f(x - (j + 1) * e)) for ck, j in zip(c[::-1], range(3))) / h
