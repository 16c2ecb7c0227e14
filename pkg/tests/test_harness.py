import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stiefelcubic import harness
from stiefelcubic.errors import ChartOutOfBounds, GridMismatch, ShootingDivergence
from stiefelcubic.harness import (
    DEFAULT_JETS,
    ErrorReport,
    ExperimentConfig,
    benchmark,
    cubic_for,
    diameter_of,
    emit_csv,
    emit_plot_csv,
    format_csv,
    mean_error,
    parse_csv,
    random_jet,
    run_comparison,
    run_experiment,
)
from stiefelcubic.trajectory import TrajectoryRecord


def record(points, times=None):
    points = np.asarray(points, dtype=float)
    times = np.linspace(0, 1, len(points)) if times is None else times
    return TrajectoryRecord(times, points, "x", h=0.1, N=len(points) - 1, manifold="sphere")


def test_config_defaults():
    cfg = ExperimentConfig()
    assert cfg.jet == DEFAULT_JETS["sphere"]
    np.testing.assert_allclose(cfg.times, np.linspace(0, 1, 11))
    assert ExperimentConfig.with_steps(40, manifold="st32").h == 0.025


@pytest.mark.parametrize(
    "kwargs",
    [
        {"h": 0.1, "N": 20},
        {"method": "euler"},
        {"manifold": "torus"},
        {"h": -0.1, "N": -10},
        {"jet": ((1.0, 1.0), (0.0, 0.0), (0.0, 0.0))},
        {"manifold": "st32", "jet": DEFAULT_JETS["sphere"]},
    ],
)
def test_config_rejects(kwargs):
    with pytest.raises(ValueError):
        ExperimentConfig(**kwargs)


def test_config_rejects_chart_exclusion():
    jet = ((math.pi / 2, 1.0, 1.0),) + DEFAULT_JETS["st32"][1:]
    with pytest.raises(ChartOutOfBounds):
        ExperimentConfig(manifold="st32", jet=jet)


def test_diameters():
    assert diameter_of(np.zeros((2, 3, 1))) == 2.0
    assert diameter_of(np.zeros((2, 3, 2))) == pytest.approx(2 * math.sqrt(2))


@given(st.integers(1, 3), st.floats(0, 2))
def test_diameter_is_max_distance(k, angle):
    # |S - (-S)|_F = 2 sqrt(k) and nothing on St(3, k) is farther
    S = np.eye(3)[:, :k]
    c, s = math.cos(angle), math.sin(angle)
    R = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
    assert np.linalg.norm(S - R @ S) <= diameter_of(S[None]) + 1e-12
    assert np.linalg.norm(S + S) == pytest.approx(diameter_of(S[None]))


def test_mean_error_identity_and_offset(rng):
    pts = rng.standard_normal((5, 3, 1))
    assert mean_error(record(pts), record(pts)).mean_error == 0.0
    offset = np.zeros((3, 1))
    offset[0, 0] = 0.25
    rep = mean_error(record(pts + offset), record(pts))
    assert rep.mean_error == pytest.approx(0.25)
    assert rep.relative_error == pytest.approx(0.125)
    assert np.all(rep.per_sample >= 0)


def test_mean_error_grid_mismatch(rng):
    pts = rng.standard_normal((5, 3, 1))
    with pytest.raises(GridMismatch):
        mean_error(record(pts), record(pts, np.linspace(0, 2, 5)))
    with pytest.raises(GridMismatch):
        mean_error(record(pts), record(pts[:4]))


def test_benchmark_grid_and_reference_step():
    cfg = ExperimentConfig.with_steps(40)
    bench = benchmark(cfg)
    assert len(bench) == 41 and bench.meta["h_ref"] == pytest.approx(1e-4)
    assert bench.check_orthonormal()
    # the coarse benchmark is a subsample of the fine one
    fine = benchmark(ExperimentConfig.with_steps(80))
    np.testing.assert_array_equal(bench.states, fine.states[::2])


@pytest.mark.parametrize("manifold", ["sphere", "st32"])
def test_gcp_interpolates_benchmark_boundary(manifold):
    cfg = ExperimentConfig(manifold=manifold)
    bench = benchmark(cfg)
    rec = run_experiment(cfg)
    np.testing.assert_allclose(rec.points[0], bench.points[0], atol=1e-6)
    np.testing.assert_allclose(rec.points[-1], bench.points[-1], atol=1e-6)
    assert rec.check_orthonormal()
    assert isinstance(cubic_for(cfg).S1, np.ndarray)


@pytest.mark.parametrize("method", ["gcp", "initial-point", "midpoint", "rk4"])
def test_degenerate_jet_gives_constant_trajectory(method):
    q = (1.0, 2.0)
    cfg = ExperimentConfig(method=method, jet=(q, (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)))
    rec = run_experiment(cfg)
    np.testing.assert_allclose(rec.points, np.tile(rec.points[0], (11, 1, 1)), atol=1e-12)
    assert mean_error(rec, benchmark(cfg)).mean_error < 1e-12


@pytest.mark.parametrize("manifold", ["sphere", "st32"])
def test_comparison_ordering(manifold):
    rows = run_comparison(manifold, [1 / 10, 1 / 20])
    assert [r.method for r in rows] == ["gcp", "initial-point", "midpoint"] * 2
    assert all(r.ok for r in rows)
    by = {(r.method, r.N): r for r in rows}
    assert by["gcp", 10].mean_error == by["gcp", 20].mean_error
    for N in (10, 20):
        assert by["midpoint", N].mean_error < by["initial-point", N].mean_error
    for method in ("initial-point", "midpoint"):
        assert by[method, 20].mean_error < by[method, 10].mean_error
    assert all(r.runtime_ms is None for r in rows)


def test_comparison_records_failures(monkeypatch):
    def boom(*args, **kwargs):
        raise ShootingDivergence("forced")

    monkeypatch.setattr(harness, "shoot_bvp", boom)
    rows = run_comparison("sphere", [1 / 10])
    assert rows[0].ok
    assert not rows[1].ok and "forced" in rows[1].error and math.isnan(rows[1].mean_error)
    assert not rows[2].ok


def test_comparison_switches_manifold():
    rows = run_comparison("st32", [1 / 10], ExperimentConfig(manifold="sphere"))
    assert {r.manifold for r in rows} == {"st32"}


def test_comparison_timing():
    rows = run_comparison("sphere", [1 / 10], timing=True)
    assert all(r.runtime_ms is not None and r.runtime_ms >= 0 for r in rows)


def test_csv_round_trip(tmp_path):
    reports = [
        ErrorReport("gcp", "sphere", 0.1, 10, 1.23456789012345e-4, 6.1728394506e-5),
        ErrorReport("midpoint", "st32", 1 / 80, 80, 3.0, 1.0, runtime_ms=12.5),
    ]
    path = tmp_path / "t.csv"
    emit_csv(reports, path)
    back = parse_csv(path)
    for a, b in zip(reports, back):
        assert (a.method, a.manifold, a.N, a.runtime_ms) == (b.method, b.manifold, b.N, b.runtime_ms)
        assert a.h == pytest.approx(b.h, rel=1e-11)
        assert a.mean_error == pytest.approx(b.mean_error, rel=1e-11)
    assert path.read_text().splitlines()[1] == "gcp,sphere,0.1,10,0.000123456789012,6.1728394506e-05,"


def test_csv_empty_report(tmp_path):
    path = tmp_path / "e.csv"
    emit_csv([], path)
    assert path.read_text() == "method,manifold,h,N,mean_error,relative_error,runtime_ms\n"
    assert parse_csv(path) == []


def test_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "b.csv"
    path.write_text("a,b\n")
    with pytest.raises(ValueError):
        parse_csv(path)


def test_csv_is_deterministic():
    a = format_csv(run_comparison("sphere", [1 / 10]))
    b = format_csv(run_comparison("sphere", [1 / 10]))
    assert a == b


def test_plot_csv(tmp_path):
    cfg = ExperimentConfig(method="midpoint")
    rep = mean_error(run_experiment(cfg), benchmark(cfg))
    path = tmp_path / "p.csv"
    emit_plot_csv(rep, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,error" and len(lines) == 12
    assert lines[1] == "0,0"


@pytest.mark.parametrize("manifold", ["sphere", "st32"])
def test_random_jet_is_valid_and_seeded(manifold):
    a = random_jet(manifold, np.random.default_rng(3))
    b = random_jet(manifold, np.random.default_rng(3))
    assert a == b
    ExperimentConfig(manifold=manifold, jet=a)
    assert replace(ExperimentConfig(manifold=manifold), jet=a).jet == a
