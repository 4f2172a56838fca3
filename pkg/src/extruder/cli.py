"""Command-line front end.

    extruder steady|gains|run|sweep|compare-pi|analyze
        --config FILE [--out DIR] [--override key=val ...] [--strict]

Exit codes: 0 ok, 2 configuration error, 3 solver failure, 4 invariant
violation (only with --strict).
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import fields as dc_fields
from pathlib import Path

import numpy as np
import yaml

from .analysis import fit_decay_rate, observer_decay_rate_bound
from .config import (coerce_value, load_config, make_config,
                     material_from_config, process_from_config)
from .control import synthesize_kernel
from .errors import (ConfigError, DegenerateDomainError, ExtruderError,
                     SolverError)
from .run import (RunRecord, invariant_report_text, load_series_csv,
                  report_from_series, run_closed_loop, sweep, sweep_summary,
                  write_series_csv, write_snapshots_csv, write_steady_csv,
                  write_summary_csv)
from .steady import solve_steady_state

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_INVARIANT = 4


def _parse_overrides(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"override {pair!r} is not key=val")
        key, _, val = pair.partition("=")
        out[key] = coerce_value(key, yaml.safe_load(val))
    return out


def _load(args) -> dict:
    overrides = _parse_overrides(args.override)
    if args.config:
        return load_config(args.config, overrides)
    return make_config(overrides)


def _out_dir(args) -> Path:
    out = Path(args.out or "out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _echo_config(cfg: dict, out: Path):
    (out / "config.yaml").write_text(yaml.safe_dump(cfg, sort_keys=True))


def _emit_run(rec: RunRecord, out: Path, stem: str = "run"):
    write_series_csv(rec, out / f"{stem}_series.csv")
    write_snapshots_csv(rec, out / f"{stem}_snapshots.csv")
    write_steady_csv(rec.steady, out / f"{stem}_steady.csv")
    (out / f"{stem}_invariants.txt").write_text(
        invariant_report_text(rec.invariants))


def cmd_steady(args) -> int:
    cfg = _load(args)
    ss = solve_steady_state(material_from_config(cfg),
                            process_from_config(cfg))
    for f in dc_fields(ss):
        print(f"{f.name:<14s} {getattr(ss, f.name)!r}")
    out = _out_dir(args)
    _echo_config(cfg, out)
    write_steady_csv(ss, out / "steady_profile.csv")
    print(f"wrote {out / 'steady_profile.csv'}")
    return EXIT_OK


def cmd_gains(args) -> int:
    cfg = _load(args)
    m = material_from_config(cfg)
    p = process_from_config(cfg)
    ss = solve_steady_state(m, p)
    kf = synthesize_kernel(m, p, ss, cfg["gain_c"])
    for name in ("c", "gamma", "C", "A", "b_bar", "D", "d1", "d2"):
        print(f"{name:<6s} {getattr(kf, name):.10g}")
    out = _out_dir(args)
    _echo_config(cfg, out)
    # phi and g are tabulated on the non-positive half-axis and f on the
    # non-negative one -- the domains the transform and feedback integral
    # actually evaluate; on the opposite side the growing kernel exponent
    # overflows for fast pull speeds.
    x = np.linspace(0.0, p.L, 401)
    with open(out / "kernel_tabulation.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "f", "phi_neg", "g_neg"])
        for xi in x:
            w.writerow([f"{xi:.12g}", f"{kf.f(xi):.12g}",
                        f"{kf.phi(-xi):.12g}", f"{kf.g(-xi):.12g}"])
    print(f"wrote {out / 'kernel_tabulation.csv'}")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _load(args)
    rec = run_closed_loop(cfg)
    out = _out_dir(args)
    _echo_config(cfg, out)
    _emit_run(rec, out)
    if not args.no_plots:
        from .plots import emit_plots
        emit_plots(rec, out)
    print(invariant_report_text(rec.invariants), end="")
    print(f"final s = {rec.final_s:.6g} m after {rec.n_accepted} steps")
    keys = ("valid_solid", "valid_liquid", "sdot_nonneg",
            "s_above_s0", "s_below_sr")
    if args.strict and not rec.invariants.all_pass(keys):
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args)
    b_list = [float(v) for v in args.b.split(",")] if args.b else \
        [0.002, 0.01, 0.05]
    c_list = [float(v) for v in args.c.split(",")] if args.c else \
        [0.2, 1.0, 5.0]
    if args.cross:
        variations = [{"b": b, "gain_c": c} for b in b_list for c in c_list]
    else:
        if len(b_list) != len(c_list):
            raise ConfigError("paired sweep needs equal-length b and c "
                              "lists (use --cross for a product)")
        variations = [{"b": b, "gain_c": c}
                      for b, c in zip(b_list, c_list)]
    records = sweep(cfg, variations, parallel=not args.serial)
    out = _out_dir(args)
    _echo_config(cfg, out)
    rows = sweep_summary(records)
    write_summary_csv(rows, out / "sweep_summary.csv")
    for i, rec in enumerate(records):
        _emit_run(rec, out, stem=f"sweep_{i:02d}")
    for row in rows:
        print(row)
    if args.strict and not all(r["all_valid"] for r in rows):
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_compare_pi(args) -> int:
    cfg = _load(args)
    cfg_bs = dict(cfg)
    cfg_bs["controller"] = "output_feedback"
    cfg_pi = dict(cfg)
    cfg_pi["controller"] = "pi"
    rec_bs = run_closed_loop(make_config(cfg_bs))
    rec_pi = run_closed_loop(make_config(cfg_pi))
    out = _out_dir(args)
    _echo_config(cfg, out)
    _emit_run(rec_bs, out, stem="backstepping")
    _emit_run(rec_pi, out, stem="pi")
    if not args.no_plots:
        from .plots import plot_pi_comparison
        plot_pi_comparison(rec_bs, rec_pi, out / "pi_comparison.svg")
    for name, rec in (("backstepping", rec_bs), ("pi", rec_pi)):
        ok = rec.invariants.all_pass(("valid_solid", "valid_liquid"))
        print(f"{name}: validity {'PASS' if ok else 'FAIL'}, "
              f"min inlet T = {np.min(rec.series['Ts_inlet']):.3f} °C")
    return EXIT_OK


def cmd_analyze(args) -> int:
    run_dir = Path(args.out or "out")
    cfg_path = run_dir / "config.yaml"
    if not cfg_path.exists():
        raise ConfigError(f"no config.yaml in {run_dir}")
    cfg = make_config(yaml.safe_load(cfg_path.read_text()))
    series_files = sorted(run_dir.glob("*_series.csv"))
    if not series_files:
        raise ConfigError(f"no *_series.csv files in {run_dir}")
    worst_ok = True
    fit_rows = []
    for path in series_files:
        series = load_series_csv(path)
        inv = report_from_series(series, cfg)
        report_path = path.with_name(path.name.replace("_series.csv",
                                                       "_report.txt"))
        report_path.write_text(invariant_report_text(inv))
        print(f"{path.name}:")
        print(invariant_report_text(inv), end="")
        keys = ("valid_solid", "valid_liquid", "sdot_nonneg")
        worst_ok = worst_ok and inv.all_pass(keys)
        if "err_H1" in series and series["err_H1"].min() > 0.0:
            m = material_from_config(cfg)
            p = process_from_config(cfg)
            fit = fit_decay_rate(series["t"], series["err_H1"],
                                 theoretical=observer_decay_rate_bound(m, p))
            fit_rows.append({"file": path.name, "rate": fit.rate,
                             "theoretical": fit.theoretical,
                             "r_squared": fit.r_squared})
    if fit_rows:
        write_summary_csv(fit_rows, run_dir / "decay_fits.csv")
    if args.strict and not worst_ok:
        return EXIT_INVARIANT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="extruder",
                                 description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)
    handlers = {"steady": cmd_steady, "gains": cmd_gains, "run": cmd_run,
                "sweep": cmd_sweep, "compare-pi": cmd_compare_pi,
                "analyze": cmd_analyze}
    for name, handler in handlers.items():
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="flat YAML/JSON config file")
        sp.add_argument("--out", help="output directory (default: out)")
        sp.add_argument("--override", action="append", default=[],
                        metavar="key=val", help="config override")
        sp.add_argument("--strict", action="store_true",
                        help="exit 4 on invariant violation")
        sp.add_argument("--no-plots", action="store_true")
        sp.set_defaults(handler=handler)
        if name == "sweep":
            sp.add_argument("--b", help="comma-separated speeds [m/s]")
            sp.add_argument("--c", help="comma-separated gains")
            sp.add_argument("--cross", action="store_true",
                            help="cross product instead of paired lists")
            sp.add_argument("--serial", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, DegenerateDomainError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ExtruderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
