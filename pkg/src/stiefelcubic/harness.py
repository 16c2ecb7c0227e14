"""Benchmark protocol: RK4 reference, GCP and shooting integrators, errors, CSV.

Protocol for one experiment:

1. Convert the initial jet ``(q0, qdot0, qddot0, q3_0)`` to momenta and
   integrate the Hamiltonian flow with RK4 at ``h_ref`` for ``total_time``.
   The samples on the experiment grid ``t_j = j h`` form the benchmark.
2. The benchmark's first and last positions and velocities are the boundary
   data shared by every method.
3. ``gcp`` samples the adjusted de Casteljau cubic at the grid times;
   ``initial-point`` / ``midpoint`` solve the boundary-value problem by
   shooting with ``N`` steps of size ``h``.

Errors are mean Frobenius distances between embedded matrices on the shared
grid; relative errors divide by the diameter ``2 sqrt(k)`` of St(n, k).
"""

from __future__ import annotations

import csv
import functools
import io
import logging
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .charts import ChartModel, get_model
from .decasteljau import CubicBoundaryData, build_cubic, sample_cubic_at
from .errors import ChartOutOfBounds, GridMismatch, StiefelError
from .symplectic import H_REF, momenta_from_jet, rk4_states, shoot_bvp
from .trajectory import TrajectoryRecord

log = logging.getLogger(__name__)

METHODS = ("gcp", "initial-point", "midpoint", "rk4")
CSV_HEADER = ("method", "manifold", "h", "N", "mean_error", "relative_error", "runtime_ms")
PLOT_HEADER = ("t", "error")
DEFAULT_H_LIST = (1 / 10, 1 / 20, 1 / 40, 1 / 80)

DEFAULT_JETS: dict[str, tuple[tuple[float, ...], ...]] = {
    "sphere": ((math.pi / 2, math.pi), (0.1, 0.2), (1.0, 0.5), (0.1, 0.2)),
    "st32": ((math.pi / 4, math.pi, math.pi), (0.1, 0.1, 0.05), (1.0, 0.3, 0.5), (0.1, 0.1, 0.05)),
}


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


@dataclass(frozen=True)
class ExperimentConfig:
    """One (manifold, method, step size) experiment.

    ``jet`` holds ``(q0, qdot0, qddot0, q3_0)``, each of length ``m``.
    ``N * h`` must equal ``total_time``.
    """

    manifold: str = "sphere"
    method: str = "gcp"
    h: float = 0.1
    N: int = 10
    jet: tuple[tuple[float, ...], ...] | None = None
    seed: int = 0
    out: str | None = None
    total_time: float = 1.0
    h_ref: float = H_REF

    def __post_init__(self):
        model = get_model(self.manifold)
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.h <= 0 or self.N < 1:
            raise ValueError("h must be positive and N at least 1")
        if abs(self.N * self.h - self.total_time) > 1e-9 * max(1.0, self.total_time):
            raise ValueError(f"N * h = {self.N * self.h!r} does not equal total_time {self.total_time!r}")
        jet = DEFAULT_JETS[model.name] if self.jet is None else self.jet
        jet = tuple(tuple(float(x) for x in part) for part in jet)
        if len(jet) != 4 or any(len(part) != model.m for part in jet):
            raise ValueError(f"jet must be four blocks of {model.m} numbers for {model.name}")
        model.check_point(jet[0])
        object.__setattr__(self, "jet", jet)
        object.__setattr__(self, "manifold", model.name)

    @classmethod
    def with_steps(cls, N: int, total_time: float = 1.0, **kwargs) -> ExperimentConfig:
        return cls(h=total_time / N, N=N, total_time=total_time, **kwargs)

    @property
    def model(self) -> ChartModel:
        return get_model(self.manifold)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.N + 1) * self.h


@dataclass
class ErrorReport:
    """Error of one method against the benchmark (one row of the CSV)."""

    method: str
    manifold: str
    h: float
    N: int
    mean_error: float
    relative_error: float
    diameter: float = float("nan")
    per_sample: np.ndarray = field(default_factory=lambda: np.empty(0))
    times: np.ndarray = field(default_factory=lambda: np.empty(0))
    runtime_ms: float | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


# -- benchmark -------------------------------------------------------------


@functools.lru_cache(maxsize=16)
def _benchmark_states(manifold: str, jet, h_ref: float, steps: int) -> np.ndarray:
    model = get_model(manifold)
    q, qd, qdd, q3 = (np.array(b) for b in jet)
    p_q, p_v = momenta_from_jet(model, q, qd, qdd, q3)
    z0 = np.concatenate([q, qd, p_q, p_v])
    states = rk4_states(model, h_ref, steps, z0)
    states.setflags(write=False)
    return states


def benchmark(cfg: ExperimentConfig) -> TrajectoryRecord:
    """RK4 benchmark sampled on the experiment grid.

    The reference step is the largest divisor of ``h`` not exceeding
    ``h_ref``, so every grid time is an RK4 node.
    """
    model = cfg.model
    sub = max(1, math.ceil(cfg.h / cfg.h_ref - 1e-9))
    states = _benchmark_states(model.name, cfg.jet, cfg.total_time / (cfg.N * sub), cfg.N * sub)
    grid = states[::sub]
    return TrajectoryRecord(
        times=cfg.times,
        points=np.array([model.embed(z[: model.m]) for z in grid]),
        method="rk4",
        h=cfg.h,
        N=cfg.N,
        states=np.array(grid),
        manifold=model.name,
        meta={"h_ref": cfg.total_time / (cfg.N * sub)},
    )


def boundary_data(cfg: ExperimentConfig, bench: TrajectoryRecord | None = None):
    """``(q0, qdot0, qN, qdotN)`` in chart coordinates from the benchmark."""
    bench = bench or benchmark(cfg)
    m = cfg.model.m
    z0, zN = bench.states[0], bench.states[-1]
    return z0[:m], z0[m : 2 * m], zN[:m], zN[m : 2 * m]


def cubic_for(cfg: ExperimentConfig, bench: TrajectoryRecord | None = None):
    model = cfg.model
    q0, v0, qN, vN = boundary_data(cfg, bench)
    data = CubicBoundaryData(model.embed(q0), model.embed(qN), model.pushforward(q0, v0), model.pushforward(qN, vN))
    return build_cubic(data)


def run_experiment(cfg: ExperimentConfig) -> TrajectoryRecord:
    """Run one method on the benchmark boundary data; see the module docstring."""
    model = cfg.model
    bench = benchmark(cfg)
    start = time.perf_counter()
    if cfg.method == "rk4":
        rec = bench
    elif cfg.method == "gcp":
        rec = sample_cubic_at(cubic_for(cfg, bench), bench.times)
        rec.h, rec.N, rec.manifold = cfg.h, cfg.N, model.name
    else:
        q0, v0, qN, vN = boundary_data(cfg, bench)
        rec = shoot_bvp(cfg.method, model, cfg.h, cfg.N, q0, v0, qN, vN)
        rec.times = bench.times
    rec.meta["runtime_s"] = time.perf_counter() - start
    rec.meta["config"] = cfg
    return rec


# -- errors ----------------------------------------------------------------


def diameter_of(points: np.ndarray) -> float:
    """Largest Frobenius distance between two points of St(n, k): ``2 sqrt(k)``."""
    return 2.0 * math.sqrt(points.shape[-1])


def mean_error(a: TrajectoryRecord, b: TrajectoryRecord) -> ErrorReport:
    """Mean over samples of ``|A_k - B_k|_F``; relative error divides by the diameter."""
    if a.points is None or b.points is None:
        raise ValueError("both trajectories need embedded points")
    if a.times.shape != b.times.shape or not np.allclose(a.times, b.times, rtol=0, atol=1e-12):
        raise GridMismatch("trajectories are sampled on different time grids")
    if a.points.shape != b.points.shape:
        raise GridMismatch(f"point shapes differ: {a.points.shape} vs {b.points.shape}")
    per = np.linalg.norm(a.points - b.points, axis=(1, 2))
    diam = diameter_of(a.points)
    mean = float(per.mean()) if len(per) else 0.0
    runtime = a.meta.get("runtime_s")
    return ErrorReport(
        method=a.method,
        manifold=a.manifold or b.manifold or "",
        h=a.h,
        N=a.N,
        mean_error=mean,
        relative_error=mean / diam,
        diameter=diam,
        per_sample=per,
        times=a.times,
        runtime_ms=None if runtime is None else 1e3 * runtime,
    )


def _cell(cfg: ExperimentConfig) -> ErrorReport:
    try:
        rec = run_experiment(cfg)
        return mean_error(rec, benchmark(cfg))
    except StiefelError as exc:
        log.error("%s/%s h=%s failed: %s", cfg.manifold, cfg.method, _fmt(cfg.h), exc)
        return ErrorReport(cfg.method, cfg.manifold, cfg.h, cfg.N, math.nan, math.nan, error=str(exc))


def run_comparison(
    manifold: str,
    h_list=DEFAULT_H_LIST,
    base_config: ExperimentConfig | None = None,
    timing: bool = False,
    jobs: int = 1,
) -> list[ErrorReport]:
    """Error table: for every ``h`` a GCP, an initial-point and a midpoint row.

    The GCP curve does not depend on ``h``; it is evaluated once on the
    finest grid and that row is repeated for every ``h``. Failing cells are
    recorded with ``error`` set and NaN errors; the sweep continues.
    """
    base = base_config or ExperimentConfig(manifold=manifold)
    if base.manifold != get_model(manifold).name:
        base = replace(base, manifold=manifold, jet=None)
    steps = [int(round(base.total_time / h)) for h in h_list]

    def cfg_for(method, N):
        return replace(base, method=method, N=N, h=base.total_time / N)

    gcp = _cell(cfg_for("gcp", max(steps)))
    cells = [cfg_for(method, N) for N in steps for method in ("initial-point", "midpoint")]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_cell, cells))
    else:
        results = [_cell(c) for c in cells]

    rows: list[ErrorReport] = []
    for i, N in enumerate(steps):
        g = replace(gcp, h=base.total_time / N, N=N)
        rows.extend([g, results[2 * i], results[2 * i + 1]])
    if not timing:
        for r in rows:
            r.runtime_ms = None
    return rows


def random_jet(manifold: str, rng: np.random.Generator, spread: float = 0.5):
    """Uniform perturbation of the default jet, redrawn until it fits the chart.

    Positions move by at most ``spread / 2``; St(3,2) starts keep a distance
    of 0.5 from the ``theta = pi/2`` exclusion.
    """
    model = get_model(manifold)
    base = DEFAULT_JETS[model.name]
    while True:
        scales = (0.5 * spread, spread, spread, spread)
        jet = tuple(
            tuple(float(x) for x in np.add(block, s * rng.uniform(-1.0, 1.0, model.m)))
            for block, s in zip(base, scales)
        )
        try:
            model.check_point(jet[0])
        except ChartOutOfBounds:
            continue
        if model.name == "st32" and abs(jet[0][0] - math.pi / 2) < 0.5:
            continue
        return jet


# -- CSV -------------------------------------------------------------------


def emit_csv(reports, path) -> None:
    """Write the error table with header ``method,manifold,h,N,mean_error,relative_error,runtime_ms``.

    Floats carry 12 significant digits; a missing runtime is an empty field.
    """
    Path(path).write_text(format_csv(reports), newline="")


def format_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in reports:
        w.writerow(
            [
                r.method,
                r.manifold,
                _fmt(r.h),
                int(r.N),
                _fmt(r.mean_error),
                _fmt(r.relative_error),
                "" if r.runtime_ms is None else _fmt(r.runtime_ms),
            ]
        )
    return buf.getvalue()


def parse_csv(path) -> list[ErrorReport]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"unexpected header in {path}")
    out = []
    for method, manifold, h, N, mean, rel, rt in rows[1:]:
        out.append(
            ErrorReport(
                method=method,
                manifold=manifold,
                h=float(h),
                N=int(N),
                mean_error=float(mean),
                relative_error=float(rel),
                runtime_ms=float(rt) if rt else None,
            )
        )
    return out


def emit_plot_csv(report: ErrorReport, path) -> None:
    """Per-sample ``t,error`` rows of one report."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PLOT_HEADER)
    for t, e in zip(report.times, report.per_sample):
        w.writerow([_fmt(t), _fmt(e)])
    Path(path).write_text(buf.getvalue(), newline="")


def emit_trajectory_csv(rec: TrajectoryRecord, path) -> None:
    """Embedded matrices in row-major order: ``t,m_0_0,m_0_1,...``."""
    n, k = rec.points.shape[1:]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t"] + [f"m_{i}_{j}" for i in range(n) for j in range(k)])
    for t, P in zip(rec.times, rec.points):
        w.writerow([_fmt(t)] + [_fmt(x) for x in P.ravel()])
    Path(path).write_text(buf.getvalue(), newline="")
