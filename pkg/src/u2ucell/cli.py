"""Command-line front end: scenario runs, parameter sweeps, figure presets.

Two subcommands:

  run     evaluate one track (exact | approx | sim) for one target
          (u2u | gue | gue-baseline), optionally sweeping a parameter,
          writing CSV and rendered figures
  figure  canned study recipes (fig2 .. fig8) reproducing the standard
          validation and trade-off plots

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis_approx import coverage_u2u_approx, coverage_gue_approx
from .analysis_exact import coverage_u2u_exact, coverage_gue_exact
from .config import ScenarioConfig, config_hash, load_config
from .curves import CoverageCurve, SharingMode
from .errors import ConfigError, ConvergenceError, DomainError, ToleranceError
from .montecarlo import ccdf_from_samples, rate_ccdf, simulate_gue, simulate_u2u
from .report import ResultRow, render_curve_figure, write_curve_csv
from .scenario import Scenario

__all__ = ["SweepSpec", "run", "emit", "main", "FIGURE_PRESETS"]

TRACKS = ("exact", "approx", "sim")
TARGETS = ("u2u", "gue", "gue-baseline")


@dataclass(frozen=True)
class SweepSpec:
    """One swept parameter: dotted config path plus start:stop:step."""

    parameter: str
    start: float
    stop: float
    step: float

    def __post_init__(self):
        if self.step <= 0.0:
            raise ConfigError("sweep step must be positive", field=self.parameter)
        if self.stop < self.start:
            raise ConfigError("sweep stop must not precede start", field=self.parameter)

    def values(self):
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [self.start + i * self.step for i in range(n)]

    @classmethod
    def parse(cls, text: str) -> "SweepSpec":
        try:
            param, rng = text.split("=", 1)
            start, stop, step = (float(v) for v in rng.split(":"))
        except ValueError as exc:
            raise ConfigError(
                f"sweep must look like key=start:stop:step, got {text!r}"
            ) from exc
        return cls(param, start, stop, step)


def _parse_grid(text: str):
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise ConfigError(f"grid must look like start:stop:step, got {text!r}") from exc
    if step <= 0.0 or stop < start:
        raise ConfigError(f"bad grid {text!r}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return np.array([start + i * step for i in range(n)])


def _target_config(cfg: ScenarioConfig, target: str) -> tuple[ScenarioConfig, str]:
    """gue-baseline evaluates the uplink with the UAV deployment removed
    and the full spectrum retained."""
    if target == "gue-baseline":
        base = cfg.copy()
        base.uav_density_per_km2 = 0.0
        base.mode = "underlay"
        return base, "gue"
    return cfg, target


def _evaluate_curve(cfg, mode, track, target, thresholds_db, drops, seed, workers):
    if target == "u2u":
        if track == "exact":
            return coverage_u2u_exact(cfg, mode, thresholds_db)
        if track == "approx":
            return coverage_u2u_approx(cfg, mode, thresholds_db)
        return ccdf_from_samples(simulate_u2u(cfg, mode, drops, seed, workers), thresholds_db)
    if track == "exact":
        return coverage_gue_exact(cfg, mode, thresholds_db)
    if track == "approx":
        return coverage_gue_approx(cfg, mode, thresholds_db)
    return ccdf_from_samples(simulate_gue(cfg, mode, drops, seed, workers), thresholds_db)


def _rate_to_sinr_db(rate_thresholds, bandwidth_hz):
    sinr = np.power(2.0, np.asarray(rate_thresholds, dtype=float) / bandwidth_hz) - 1.0
    if np.any(sinr <= 0.0):
        raise ConfigError("rate thresholds must be positive")
    return 10.0 * np.log10(sinr)


def run(
    cfg: ScenarioConfig,
    track: str,
    target: str,
    sweep: SweepSpec | None = None,
    thresholds_db=None,
    rate: bool = False,
    rate_thresholds=None,
    drops: int | None = None,
    seed: int | None = None,
    workers: int | None = None,
) -> list[ResultRow]:
    """Evaluate one track/target over an optional sweep.

    Returns one row per sweep value. For rate curves the analytical
    tracks are evaluated directly at the mapped SINR thresholds; the
    simulation track thresholds its samples exactly.
    """
    if track not in TRACKS:
        raise ConfigError(f"unknown track {track!r}")
    if target not in TARGETS:
        raise ConfigError(f"unknown target {target!r}")
    if thresholds_db is None and not rate:
        thresholds_db = np.arange(-10.0, 30.0 + 1e-9, 2.0)
    if rate and rate_thresholds is None:
        raise ConfigError("rate mode needs rate thresholds")
    drops = drops if drops is not None else cfg.sim.drops
    seed = seed if seed is not None else cfg.sim.seed

    points = sweep.values() if sweep is not None else [None]
    rows = []
    for value in points:
        try:
            rows.append(
                _run_point(cfg, track, target, sweep, value, thresholds_db, rate,
                           rate_thresholds, drops, seed, workers)
            )
        except (ToleranceError, ConvergenceError) as exc:
            where = f"{sweep.parameter}={value}" if sweep is not None else "base point"
            raise type(exc)(f"{exc} (at sweep point {where})") from exc
    return rows


def _run_point(cfg, track, target, sweep, value, thresholds_db, rate,
               rate_thresholds, drops, seed, workers):
    cfg_i = cfg.with_value(sweep.parameter, value) if sweep is not None else cfg
    cfg_i, eff_target = _target_config(cfg_i, target)
    scn = Scenario(cfg_i)
    mode = scn.mode
    if rate:
        bandwidth = scn.bandwidth_uav_hz if eff_target == "u2u" else scn.bandwidth_gue_hz
        if target == "gue-baseline":
            bandwidth = cfg_i.bandwidth_mhz * 1e6
        if bandwidth <= 0.0:
            raise ConfigError("allocated bandwidth is zero for this target", field="eta_u")
        if track == "sim":
            samples = (
                simulate_u2u(cfg_i, mode, drops, seed, workers)
                if eff_target == "u2u"
                else simulate_gue(cfg_i, mode, drops, seed, workers)
            )
            curve = rate_ccdf(samples, bandwidth, rate_thresholds)
        else:
            sinr_db = _rate_to_sinr_db(rate_thresholds, bandwidth)
            base = _evaluate_curve(cfg_i, mode, track, eff_target, sinr_db, drops, seed, workers)
            curve = CoverageCurve(np.asarray(rate_thresholds, dtype=float), base.coverage)
    else:
        curve = _evaluate_curve(
            cfg_i, mode, track, eff_target, thresholds_db, drops, seed, workers
        )
    return ResultRow(
        sweep_param=sweep.parameter if sweep is not None else "none",
        sweep_value=value if value is not None else "",
        curve=curve,
    )


def emit(
    rows: list[ResultRow],
    formats,
    out_dir,
    name: str,
    cfg: ScenarioConfig,
    rate: bool = False,
) -> list[Path]:
    """Write the result table (CSV) and/or the rendered figure (SVG/PNG)."""
    if not rows:
        raise DomainError("nothing to emit")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    label = "threshold_bps" if rate else "threshold_db"
    digest = config_hash(cfg)
    for fmt in formats:
        if fmt == "csv":
            written.append(write_curve_csv(rows, out / f"{name}.csv", threshold_label=label))
        elif fmt in ("svg", "png"):
            written.append(
                render_curve_figure(
                    rows,
                    out / f"{name}.{fmt}",
                    title=name,
                    xlabel="rate threshold [bps]" if rate else "SINR threshold [dB]",
                    config_hash=digest,
                    ylabel="coverage probability",
                )
            )
        else:
            raise ConfigError(f"unknown output format {fmt!r}")
    return written


# ---------------------------------------------------------------------------
# figure presets
# ---------------------------------------------------------------------------


def _preset_fig2(cfg, out, drops, seed, workers, formats):
    """Validation triangle: exact, approximate and simulated coverage for
    both link types in the underlay at full UAV spectrum access."""
    cfg = cfg.copy()
    cfg.eta_u = 1.0
    cfg.mode = "underlay"
    thr = np.arange(-10.0, 30.0 + 1e-9, 2.0)
    paths = []
    for target in ("u2u", "gue"):
        rows = []
        for track in ("exact", "approx", "sim"):
            r = run(cfg, track, target, thresholds_db=thr, drops=drops, seed=seed, workers=workers)
            rows.append(ResultRow("track", track, r[0].curve))
        paths += emit(rows, formats, out, f"fig2_{target}", cfg)
    return paths


def _preset_fig3(cfg, out, drops, seed, workers, formats):
    """SINR CCDF at two flight heights plus the no-UAV uplink baseline."""
    thr = np.arange(-10.0, 30.0 + 1e-9, 2.0)
    paths = []
    for target in ("u2u", "gue"):
        rows = []
        for h in (50.0, 150.0):
            cfg_h = cfg.with_value("heights.h_u", h)
            cfg_h.eta_u = 1.0
            cfg_h.mode = "underlay"
            r = run(cfg_h, "approx", target, thresholds_db=thr, drops=drops, seed=seed, workers=workers)
            rows.append(ResultRow("heights.h_u", h, r[0].curve))
        paths += emit(rows, formats, out, f"fig3_{target}", cfg)
    base = run(cfg, "approx", "gue-baseline", thresholds_db=thr)
    paths += emit(
        [ResultRow("baseline", "no-uav", base[0].curve)], formats, out, "fig3_gue_baseline", cfg
    )
    return paths


def _preset_fig4(cfg, out, drops, seed, workers, formats):
    """Power-control trade-off: coverage at -5 dB against the UAV
    fractional compensation factor, for three pair-distance scales."""
    thr = np.array([-5.0])
    sweep = SweepSpec("uav_power.epsilon", 0.0, 1.0, 0.1)
    paths = []
    for target in ("u2u", "gue"):
        rows = []
        for rbar in (50.0, 100.0, 150.0):
            cfg_r = cfg.with_value("mean_u2u_dist_m", rbar)
            cfg_r.eta_u = 1.0
            cfg_r.mode = "underlay"
            swept = run(cfg_r, "approx", target, sweep=sweep, thresholds_db=thr)
            curve = CoverageCurve(
                np.array([row.sweep_value for row in swept]),
                np.array([row.curve.coverage[0] for row in swept]),
            )
            rows.append(ResultRow("mean_u2u_dist_m", rbar, curve))
        paths += emit(rows, formats, out, f"fig4_{target}", cfg)
    return paths


def _preset_fig5(cfg, out, drops, seed, workers, formats):
    """Coverage at -5 dB across spectrum-access / power / density combos."""
    thr = np.array([-5.0])
    records = []
    for lam in (1.0, 5.0):
        for eps in (0.6, 0.8):
            for eta in (0.1, 0.5):
                cfg_i = cfg.copy()
                cfg_i.uav_density_per_km2 = lam
                cfg_i.uav_power.epsilon = eps
                cfg_i.eta_u = eta
                cfg_i.mode = "underlay"
                for target in ("u2u", "gue"):
                    c = run(cfg_i, "approx", target, thresholds_db=thr)[0].curve
                    records.append((lam, eps, eta, target, c.coverage[0]))
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "fig5_combined.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("uav_density_per_km2,epsilon_u,eta_u,target,coverage_at_-5db\n")
        for rec in records:
            fh.write(",".join(str(v) for v in rec) + "\n")
    return [path]


def _rate_grid():
    return np.geomspace(1e3, 2e7, 60)


def _preset_fig6(cfg, out, drops, seed, workers, formats):
    """UAV pair rate CCDF, underlay vs overlay, eta_u = 0.1."""
    return _rate_preset(cfg, out, "u2u", "fig6_u2u_rate", formats)


def _preset_fig7(cfg, out, drops, seed, workers, formats):
    """Uplink rate CCDF, underlay vs overlay, eta_u = 0.1."""
    return _rate_preset(cfg, out, "gue", "fig7_gue_rate", formats)


def _rate_preset(cfg, out, target, name, formats):
    rows = []
    grid = _rate_grid()
    for sharing in ("underlay", "overlay"):
        for eps in (0.6, 0.8):
            for lam in (1.0, 5.0):
                cfg_i = cfg.copy()
                cfg_i.mode = sharing
                cfg_i.eta_u = 0.1
                cfg_i.uav_power.epsilon = eps
                cfg_i.uav_density_per_km2 = lam
                curve = run(cfg_i, "approx", target, rate=True, rate_thresholds=grid)[0].curve
                rows.append(ResultRow("case", f"{sharing}-eps{eps}-lam{lam}", curve))
    paths = emit(rows, formats, out, name, cfg, rate=True)
    return paths


def _preset_fig8(cfg, out, drops, seed, workers, formats):
    """Trade-off between the fraction of UAV pairs under 100 kbps and the
    5th-percentile uplink rate, across sharing modes and powers."""
    grid = _rate_grid()
    records = []
    for lam in (1.0, 5.0):
        for sharing in ("underlay", "overlay"):
            for eps in (0.6, 0.8):
                cfg_i = cfg.copy()
                cfg_i.mode = sharing
                cfg_i.eta_u = 0.1
                cfg_i.uav_power.epsilon = eps
                cfg_i.uav_density_per_km2 = lam
                u2u = run(cfg_i, "approx", "u2u", rate=True, rate_thresholds=grid)[0].curve
                gue = run(cfg_i, "approx", "gue", rate=True, rate_thresholds=grid)[0].curve
                p_below = 1.0 - u2u.value_at_db(1e5)  # curve axis is bps here
                gue_5pct = gue.quantile_db(0.95)
                records.append((lam, sharing, eps, p_below, gue_5pct))
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "fig8_tradeoff.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            "uav_density_per_km2,sharing,epsilon_u,p_u2u_rate_below_100kbps,gue_rate_5th_pct_bps\n"
        )
        for rec in records:
            fh.write(",".join(str(v) for v in rec) + "\n")
    paths = [path]
    if any(f in ("svg", "png") for f in formats):
        import matplotlib.pyplot as plt

        fmt = "svg" if "svg" in formats else "png"
        fig, ax = plt.subplots(figsize=(6.4, 4.2))
        markers = {"underlay": "o", "overlay": "s"}
        for lam, sharing, eps, p_below, g5 in records:
            ax.scatter(
                p_below, g5, marker=markers[sharing],
                label=f"{sharing} eps={eps} lam={lam}",
            )
        ax.set_xlabel("P[UAV pair rate < 100 kbps]")
        ax.set_ylabel("5th-percentile uplink rate [bps]")
        ax.grid(True, alpha=0.4)
        ax.legend(fontsize=7)
        fig.tight_layout()
        fig_path = Path(out) / f"fig8_tradeoff.{fmt}"
        fig.savefig(fig_path, metadata={"Date": None} if fmt == "svg" else {})
        plt.close(fig)
        paths.append(fig_path)
    return paths


FIGURE_PRESETS = {
    "fig2": _preset_fig2,
    "fig3": _preset_fig3,
    "fig4": _preset_fig4,
    "fig5": _preset_fig5,
    "fig6": _preset_fig6,
    "fig7": _preset_fig7,
    "fig8": _preset_fig8,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="u2ucell",
        description="Coverage and rate analysis of UAV pair links sharing cellular uplink spectrum",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="evaluate one track/target, optionally sweeping")
    p_run.add_argument("--config", type=str, default=None, help="JSON scenario file")
    p_run.add_argument("--track", choices=TRACKS, required=True)
    p_run.add_argument("--target", choices=TARGETS, required=True)
    p_run.add_argument("--sweep", type=str, default=None, help="key=start:stop:step")
    p_run.add_argument(
        "--thresholds", type=str, default="-10:30:2",
        help="start:stop:step in dB (bps with --rate)",
    )
    p_run.add_argument("--rate", action="store_true", help="emit rate CCDF instead of SINR coverage")
    p_run.add_argument("--drops", type=int, default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--workers", type=int, default=None)
    p_run.add_argument("--out", type=str, default="results")
    p_run.add_argument("--format", type=str, default="csv", help="csv[,svg[,png]]")

    p_fig = sub.add_parser("figure", help="run a canned figure recipe")
    p_fig.add_argument("preset", choices=sorted(FIGURE_PRESETS))
    p_fig.add_argument("--config", type=str, default=None)
    p_fig.add_argument("--drops", type=int, default=100_000)
    p_fig.add_argument("--seed", type=int, default=1)
    p_fig.add_argument("--workers", type=int, default=None)
    p_fig.add_argument("--out", type=str, default="figures")
    p_fig.add_argument("--format", type=str, default="csv,svg")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else ScenarioConfig().validate()
        formats = [f.strip() for f in args.format.split(",") if f.strip()]
        if args.command == "run":
            sweep = SweepSpec.parse(args.sweep) if args.sweep else None
            grid = _parse_grid(args.thresholds)
            rows = run(
                cfg,
                args.track,
                args.target,
                sweep=sweep,
                thresholds_db=None if args.rate else grid,
                rate=args.rate,
                rate_thresholds=grid if args.rate else None,
                drops=args.drops,
                seed=args.seed,
                workers=args.workers,
            )
            name = f"{args.target}_{args.track}" + ("_rate" if args.rate else "")
            paths = emit(rows, formats, args.out, name, cfg, rate=args.rate)
        else:
            paths = FIGURE_PRESETS[args.preset](
                cfg, args.out, args.drops, args.seed, args.workers, formats
            )
        for p in paths:
            print(p)
        return 0
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (ToleranceError, ConvergenceError, DomainError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
