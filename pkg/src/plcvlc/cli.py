"""Batch front end: sweeps, CSV emission, fit reports, MC validation runs.

Verbs:
  op / bep / capacity  -- sweep one metric, optionally with an MC cross-check
  fit                  -- report the fitted lognormal-sum constants
  validate             -- run every bundled figure recipe with MC agreement

CSV rows always carry the fixed column set
sweep_var,sweep_value,analytic,mc_mean,mc_stderr,z,pass with 10-significant-
digit decimal formatting, so byte-identical output for identical config and
seed is part of the contract. Exit codes: 0 ok, 2 parse, 3 validation,
4 numerical, 5 MC agreement failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from importlib import resources

from . import mc as _mc
from .cascade import average_bep, ergodic_capacity, outage_probability
from .config import (ConfigError, ConfigValidationError, RunConfig, SweepSpec,
                     build_cascade_model, build_plc_model, fit_config_of, fading_of,
                     load_config, mc_config_of, metric_config_of, modulation_of,
                     parse_config_text)
from .plc import FitError, PlcTopology, fit_lognormal_sum
from .specfun import std_normal_cdf

CSV_HEADER = "sweep_var,sweep_value,analytic,mc_mean,mc_stderr,z,pass"

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4
EXIT_AGREEMENT = 5


@dataclass
class SweepRow:
    """One CSV row: a sweep point with its analytic and optional MC values."""

    sweep_var: str
    sweep_value: float
    analytic: float
    mc_mean: float | None = None
    mc_stderr: float | None = None
    z: float | None = None
    passed: bool | None = None

    def to_csv(self) -> str:
        def num(x) -> str:
            return "" if x is None else format(x, ".10g")

        verdict = "" if self.passed is None else ("pass" if self.passed else "fail")
        return ",".join([self.sweep_var, num(self.sweep_value), num(self.analytic),
                         num(self.mc_mean), num(self.mc_stderr), num(self.z), verdict])


def run_metric(cfg: RunConfig, metric: str, sweep: SweepSpec, with_mc: bool) -> list[SweepRow]:
    """Evaluate one metric over a sweep; one row per point, in sweep order."""
    rows = []
    for index, value in enumerate(sweep.values()):
        try:
            rows.append(_run_point(cfg, metric, sweep.variable, float(value), index, with_mc))
        except (ConfigError, FitError):
            raise
        except ValueError as exc:
            raise ConfigValidationError(
                f"at sweep point {sweep.variable} = {value:g}: {exc}") from exc
    return rows


def _run_point(cfg: RunConfig, metric: str, variable: str, value: float,
               index: int, with_mc: bool) -> SweepRow:
    point_cfg = cfg.with_sweep_value(variable, value)
    model = build_cascade_model(point_cfg)
    metric_cfg = metric_config_of(point_cfg)
    mod = modulation_of(point_cfg)

    if metric == "op":
        analytic = outage_probability(model, metric_cfg.gamma_th)
    elif metric == "bep":
        analytic = average_bep(model, mod, metric_cfg)
    elif metric == "capacity":
        analytic = ergodic_capacity(model, metric_cfg)
    else:
        raise ConfigValidationError(f"unknown metric {metric!r}")

    row = SweepRow(sweep_var=variable, sweep_value=value, analytic=analytic)
    if with_mc:
        mc_cfg = mc_config_of(point_cfg)
        offset = index * mc_cfg.streams  # independent streams per sweep point
        if metric == "op":
            est = _mc.estimate_op(model, metric_cfg.gamma_th, mc_cfg, stream_offset=offset)
        elif metric == "bep":
            est = _mc.estimate_bep(model, mod, mc_cfg, stream_offset=offset)
        else:
            est = _mc.estimate_capacity(model, mc_cfg, stream_offset=offset)
        record = _mc.compare_report(analytic, est, z_threshold=point_cfg.mc_z_threshold)
        passed = record.passed
        if metric == "op":
            # the fitted-CDF family also has to track the exact sampler absolutely
            fit = model.plc.fit
            passed = passed and record.abs_deviation <= max(0.01, 2.0 * fit.fit_error)
        row.mc_mean, row.mc_stderr, row.z, row.passed = est.mean, est.std_error, record.z, passed
    return row


def rows_to_csv(rows: list[SweepRow]) -> str:
    return "\n".join([CSV_HEADER] + [row.to_csv() for row in rows]) + "\n"


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def parse_sweep_flag(flag: str) -> SweepSpec:
    parts = flag.split(":")
    if len(parts) not in (4, 5):
        raise ConfigValidationError(
            f"--sweep expects var:start:stop:points[:log], got {flag!r}")
    scale = "linear"
    if len(parts) == 5:
        if parts[4] not in ("log", "linear"):
            raise ConfigValidationError(f"--sweep scale must be 'log' or 'linear', got {parts[4]!r}")
        scale = parts[4]
    try:
        return SweepSpec(variable=parts[0], start=float(parts[1]), stop=float(parts[2]),
                         points=int(parts[3]), scale=scale)
    except ValueError as exc:
        raise ConfigValidationError(f"--sweep: {exc}") from exc


def fit_report(cfg: RunConfig) -> str:
    """Text report of the fitted lognormal-sum constants for the configured PLC."""
    topology = PlcTopology(num_relays=cfg.plc_m, num_wires=cfg.plc_k)
    fit = fit_lognormal_sum(topology, fading_of(cfg), fit_config_of(cfg))
    limit = float(std_normal_cdf(fit.a0)) ** cfg.plc_m
    fading = fading_of(cfg)
    lines = [
        f"num_wires_k = {cfg.plc_k}",
        f"num_relays_m = {cfg.plc_m}",
        f"mu_h = {fading.mu_h:.10g}",
        f"sigma2_h = {fading.sigma2_h:.10g}",
        f"a0 = {fit.a0:.10g}",
        f"a1 = {fit.a1:.10g}",
        f"a2 = {fit.a2:.10g}",
        f"fit_error = {fit.fit_error:.10g}",
        f"cdf_limit = {limit:.10g}",
    ]
    return "\n".join(lines) + "\n"


def bundled_recipes() -> list[tuple[str, str]]:
    """(name, text) pairs for the checked-in figure recipe configs."""
    out = []
    root = resources.files("plcvlc").joinpath("recipes")
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".cfg"):
            out.append((entry.name[:-len(".cfg")], entry.read_text(encoding="utf-8")))
    return out


def _apply_overrides(cfg: RunConfig, args) -> tuple[RunConfig, bool]:
    with_mc = False
    if getattr(args, "mc", None) is not None:
        cfg = cfg.replacing(mc_trials=args.mc)
        with_mc = True
    if getattr(args, "seed", None) is not None:
        cfg = cfg.replacing(mc_seed=args.seed)
    if getattr(args, "quad_order", None) is not None:
        cfg = cfg.replacing(cascade_quad_order=args.quad_order)
    return cfg, with_mc


def _cmd_metric(args, metric: str) -> int:
    cfg = load_config(args.config) if args.config else RunConfig()
    cfg, with_mc = _apply_overrides(cfg, args)
    if args.sweep is not None:
        sweep = parse_sweep_flag(args.sweep)
    elif cfg.sweep is not None:
        sweep = cfg.sweep
    else:
        raise ConfigValidationError("no sweep given: pass --sweep or a sweep.* config section")
    rows = run_metric(cfg, metric, sweep, with_mc)
    _write_text(args.out, rows_to_csv(rows))
    if args.plot:
        from .plotting import render_sweep_figure
        render_sweep_figure(rows, metric, args.plot)
    if with_mc and any(row.passed is False for row in rows):
        return EXIT_AGREEMENT
    return EXIT_OK


def _cmd_fit(args) -> int:
    cfg = load_config(args.config) if args.config else RunConfig()
    _write_text(args.out, fit_report(cfg))
    return EXIT_OK


def _cmd_validate(args) -> int:
    import os

    out_dir = args.out or "validate_out"
    os.makedirs(out_dir, exist_ok=True)
    failures = 0
    for name, text in bundled_recipes():
        cfg = parse_config_text(text, origin=name)
        cfg, _ = _apply_overrides(cfg, args)
        if cfg.run_metric is None or cfg.sweep is None:
            raise ConfigValidationError(f"recipe {name} lacks run.metric or sweep section")
        rows = run_metric(cfg, cfg.run_metric, cfg.sweep, with_mc=True)
        csv_path = os.path.join(out_dir, f"{name}.csv")
        _write_text(csv_path, rows_to_csv(rows))
        if args.plot:
            from .plotting import render_sweep_figure
            render_sweep_figure(rows, cfg.run_metric, os.path.join(out_dir, f"{name}.png"),
                                title=name)
        n_fail = sum(1 for row in rows if row.passed is False)
        failures += n_fail
        worst = max((row.z for row in rows if row.z is not None), default=0.0)
        status = "ok" if n_fail == 0 else f"{n_fail} FAILED"
        print(f"{name}: {len(rows)} points, max |z| = {worst:.2f}, {status}")
    return EXIT_AGREEMENT if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plcvlc",
        description="Outage, BEP and capacity analysis of a relayed PLC/VLC link",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, sweep: bool):
        p.add_argument("--config", help="config file (flat dotted-key format)")
        p.add_argument("--out", help="output path (default: stdout)")
        if sweep:
            p.add_argument("--sweep", help="var:start:stop:points[:log]")
            p.add_argument("--mc", type=int, metavar="TRIALS",
                           help="also run the MC cross-check with this many trials")
            p.add_argument("--seed", type=int, help="MC base seed override")
            p.add_argument("--quad-order", type=int, dest="quad_order",
                           help="Gauss-Legendre order override")
            p.add_argument("--plot", nargs="?", const=None, default=False,
                           metavar="PNG", help="render the sweep to an image file")

    for verb in ("op", "bep", "capacity"):
        add_common(sub.add_parser(verb, help=f"sweep the {verb} metric"), sweep=True)
    add_common(sub.add_parser("fit", help="report fitted lognormal-sum constants"), sweep=False)

    val = sub.add_parser("validate", help="run the bundled figure recipes with MC agreement")
    val.add_argument("--out", help="output directory (default: validate_out)")
    val.add_argument("--mc", type=int, metavar="TRIALS", help="override recipe trial counts")
    val.add_argument("--seed", type=int, help="MC base seed override")
    val.add_argument("--quad-order", type=int, dest="quad_order")
    val.add_argument("--plot", action="store_true", help="also render one figure per recipe")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    # normalize the tri-state --plot of the metric verbs (False / None / path)
    if getattr(args, "plot", False) is None:
        base = args.out or f"{args.command}_sweep.csv"
        args.plot = (base[:-4] if base.endswith(".csv") else base) + ".png"
    try:
        if args.command in ("op", "bep", "capacity"):
            return _cmd_metric(args, args.command)
        if args.command == "fit":
            return _cmd_fit(args)
        return _cmd_validate(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FitError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, FloatingPointError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
