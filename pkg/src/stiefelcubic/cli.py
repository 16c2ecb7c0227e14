"""Command line entry point: ``stiefelcubic {run,compare,sweep}``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import harness
from .charts import get_model
from .errors import StiefelError

log = logging.getLogger("stiefelcubic")

CONFIG_KEYS = {"manifold", "method", "h", "steps", "jet", "seed", "out", "total_time", "h_ref", "h_list", "count"}


def read_config(path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def parse_jet(text: str, m: int) -> tuple[tuple[float, ...], ...]:
    nums = [float(x) for x in text.replace(" ", "").split(",") if x]
    if len(nums) != 4 * m:
        raise ValueError(f"--jet needs {4 * m} comma-separated numbers (q, qdot, qddot, q3), got {len(nums)}")
    return tuple(tuple(nums[i * m : (i + 1) * m]) for i in range(4))


def parse_h_list(text: str) -> list[float]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if "/" in part:
            num, den = part.split("/")
            out.append(float(num) / float(den))
        elif part:
            out.append(float(part))
    return out


def _settings(args) -> dict[str, str]:
    settings = read_config(args.config) if args.config else {}
    for key in ("manifold", "method", "h", "steps", "jet", "seed", "out", "total_time", "h_list", "count"):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = str(value)
    return settings


def build_config(settings: dict[str, str]) -> harness.ExperimentConfig:
    manifold = get_model(settings.get("manifold", "sphere")).name
    total = float(settings.get("total_time", 1.0))
    if "steps" in settings:
        N = int(settings["steps"])
    elif "h" in settings:
        N = int(round(total / parse_h_list(settings["h"])[0]))
    else:
        N = 10
    jet = parse_jet(settings["jet"], get_model(manifold).m) if "jet" in settings else None
    return harness.ExperimentConfig(
        manifold=manifold,
        method=settings.get("method", "gcp"),
        h=total / N,
        N=N,
        jet=jet,
        seed=int(settings.get("seed", 0)),
        out=settings.get("out"),
        total_time=total,
        h_ref=float(settings.get("h_ref", harness.H_REF)),
    )


def _print_table(reports, stream=None) -> None:
    stream = stream or sys.stdout
    print(f"{'method':<14}{'h':>10}{'N':>6}{'mean_error':>16}{'relative':>12}{'log10 err':>11}", file=stream)
    for r in reports:
        if not r.ok:
            print(f"{r.method:<14}{r.h:>10.5g}{r.N:>6}  FAILED: {r.error}", file=stream)
            continue
        lg = np.log10(r.mean_error) if r.mean_error > 0 else float("-inf")
        print(
            f"{r.method:<14}{r.h:>10.5g}{r.N:>6}{r.mean_error:>16.6e}{100 * r.relative_error:>11.4f}%{lg:>11.3f}",
            file=stream,
        )


def _report_failures(reports) -> int:
    failed = [r for r in reports if not r.ok]
    for r in failed:
        print(f"error: {r.manifold}/{r.method} h={r.h:g}: {r.error}", file=sys.stderr)
    return 2 if failed else 0


def cmd_run(args) -> int:
    cfg = build_config(_settings(args))
    try:
        rec = harness.run_experiment(cfg)
        report = harness.mean_error(rec, harness.benchmark(cfg))
    except StiefelError as exc:
        print(f"error: {cfg.manifold}/{cfg.method} h={cfg.h:g}: {exc}", file=sys.stderr)
        return 2
    if not args.timing:
        report.runtime_ms = None
    _print_table([report])
    if cfg.out:
        harness.emit_trajectory_csv(rec, cfg.out)
        if args.errors:
            harness.emit_plot_csv(report, args.errors)
    return 0


def _emit_plot_dir(reports, plot_dir) -> None:
    d = Path(plot_dir)
    d.mkdir(parents=True, exist_ok=True)
    seen = set()
    for r in reports:
        key = (r.manifold, r.method, r.N)
        if r.ok and key not in seen:
            seen.add(key)
            harness.emit_plot_csv(r, d / f"{r.manifold}_{r.method}_N{r.N}.csv")


def cmd_compare(args) -> int:
    settings = _settings(args)
    base = build_config(settings)
    h_list = parse_h_list(settings["h_list"]) if "h_list" in settings else list(harness.DEFAULT_H_LIST)
    reports = harness.run_comparison(base.manifold, h_list, base, timing=args.timing, jobs=args.jobs)
    _print_table(reports)
    if base.out:
        harness.emit_csv(reports, base.out)
    if args.plot_dir:
        _emit_plot_dir(reports, args.plot_dir)
    return _report_failures(reports)


def cmd_sweep(args) -> int:
    """Comparison tables for ``count`` seeded random jets."""
    settings = _settings(args)
    base = build_config(settings)
    h_list = parse_h_list(settings["h_list"]) if "h_list" in settings else list(harness.DEFAULT_H_LIST)
    count = int(settings.get("count", 5))
    rng = np.random.default_rng(base.seed)
    reports, jets = [], []
    for i in range(count):
        jet = harness.random_jet(base.manifold, rng)
        jets.append(jet)
        rows = harness.run_comparison(base.manifold, h_list, replace(base, jet=jet), timing=args.timing, jobs=args.jobs)
        print(f"# jet {i}: {jet}")
        _print_table(rows)
        reports.extend(rows)
    if base.out:
        harness.emit_csv(reports, base.out)
        with open(f"{base.out}.jets.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["index", "q", "qdot", "qddot", "q3"])
            for i, jet in enumerate(jets):
                w.writerow([i] + [";".join(format(x, ".12g") for x in part) for part in jet])
    return _report_failures(reports)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stiefelcubic", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--manifold", choices=["sphere", "st32"])
        p.add_argument("--h", help="time step (e.g. 0.05 or 1/20)")
        p.add_argument("--steps", type=int, help="number of steps N (h = total_time / N)")
        p.add_argument("--jet", help="q,qdot,qddot,q3 as 4m comma-separated numbers")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output CSV path")
        p.add_argument("--timing", action="store_true", help="record wall-clock runtimes (breaks byte determinism)")

    p_run = sub.add_parser("run", help="run one method and write its trajectory")
    common(p_run)
    p_run.add_argument("--method", choices=list(harness.METHODS))
    p_run.add_argument("--errors", help="write per-sample t,error rows here")
    p_run.set_defaults(func=cmd_run)

    for name, func, helptext in (
        ("compare", cmd_compare, "error table over a list of step sizes"),
        ("sweep", cmd_sweep, "comparison tables over seeded random jets"),
    ):
        p = sub.add_parser(name, help=helptext)
        common(p)
        p.add_argument("--h-list", dest="h_list", help="comma-separated step sizes (default 1/10,1/20,1/40,1/80)")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for independent cells")
        if name == "compare":
            p.add_argument("--plot-dir", help="directory for per-sample t,error files")
        else:
            p.add_argument("--count", type=int, help="number of random jets (default 5)")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
