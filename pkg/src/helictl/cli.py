"""Command-line entry point: ``helictl <command> ...``.

Exit codes: 0 success, 1 configuration error, 2 numerical overflow,
3 I/O error, 4 a verification check failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import yaml

from .errors import ConfigError, DomainError, NumericalOverflowError
from .harness.bounds import bound_consistency_report, finite_time_bounds
from .harness.config import ScenarioConfig, dump_config, load_config, nominal_config
from .harness.io import emit_plot_script, export_csv
from .harness.metrics import compute_metrics
from .harness.simulate import TimeSeries, run_scenario
from .harness.suites import difftest_suite, traintest_suite

EXIT_OK, EXIT_CONFIG, EXIT_OVERFLOW, EXIT_IO, EXIT_CHECK = 0, 1, 2, 3, 4

log = logging.getLogger("helictl")


def _load(args) -> ScenarioConfig:
    if args.config is None:
        cfg = nominal_config()
    else:
        cfg = load_config(args.config, degrees=args.deg)
    if getattr(args, "t_end", None) is not None:
        cfg = replace(cfg, t_end=args.t_end)
    if getattr(args, "dt", None) is not None:
        cfg = replace(cfg, dt=args.dt)
    return cfg


def _metrics_window(cfg: ScenarioConfig) -> tuple[float, float]:
    # steady-state window is the second half of the run
    return (cfg.t_end / 2, cfg.t_end)


def _run(cfg: ScenarioConfig) -> TimeSeries:
    return run_scenario(cfg)


def _fmt_metrics(label: str, m) -> str:
    settle = f"{m.settling_time:.4f}" if m.settled else "unsettled"
    return (f"{label:<10} rmse={math.degrees(m.rmse):.6f} deg  settling={settle} s  "
            f"max|e1| after settling={math.degrees(m.max_error_after_settling):.6f} deg  "
            f"final V={m.final_V:.3e}  peak|u1|={m.peak_u:.4f}")


def cmd_simulate(args) -> int:
    cfg = _load(args)
    if args.controller:
        cfg = cfg.with_variant(args.controller)
    want_csv = args.csv or cfg.output.csv
    want_plot = args.plot or cfg.output.plot
    diag = args.diag or cfg.output.diag
    if cfg.elevation.gains.eta2_warning:
        log.warning("gains give m_i <= n_i/(1+h): finite-time decay coefficient is not positive")
    series = _run(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    label = cfg.controller
    if want_csv or want_plot:
        csv_path = export_csv(series, out / f"{label}.csv", diag=diag, stride=cfg.output.stride)
        if want_plot:
            emit_plot_script({label: csv_path}, out / f"plot_{label}.py")
    if series.error is None and len(series) and series.t[-1] > 0:
        m = compute_metrics(series, _metrics_window(cfg))
        print(_fmt_metrics(label, m))
        report = {"controller": label, **m.as_dict()}
        if diag:
            report["bound_consistency"] = bound_consistency_report(
                series, cfg.elevation.gains, t_from=min(5.0, cfg.t_end / 2))
        (out / f"metrics_{label}.json").write_text(json.dumps(report, indent=2) + "\n")
    if series.error:
        print(f"error: {series.error}", file=sys.stderr)
        return EXIT_OVERFLOW
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = _load(args)
    cfgs = [cfg.with_variant("proposed"), cfg.with_variant("baseline")]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=min(args.jobs, 2)) as pool:
            runs = list(pool.map(_run, cfgs))
    else:
        runs = [_run(c) for c in cfgs]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    paths, rows = {}, []
    status = EXIT_OK
    for c, series in zip(cfgs, runs):
        paths[c.controller] = export_csv(series, out / f"{c.controller}.csv", diag=args.diag,
                                         stride=c.output.stride)
        if series.error:
            print(f"{c.controller}: error: {series.error}", file=sys.stderr)
            status = EXIT_OVERFLOW
            continue
        m = compute_metrics(series, _metrics_window(c))
        print(_fmt_metrics(c.controller, m))
        rows.append({"controller": c.controller, **m.as_dict()})
    emit_plot_script(paths, out / "plot_compare.py")
    if rows:
        keys = list(rows[0])
        lines = [",".join(keys)] + [",".join(repr(r[k]) if not isinstance(r[k], str) else r[k]
                                             for k in keys) for r in rows]
        (out / "metrics.csv").write_text("\n".join(lines) + "\n")
    return status


def cmd_difftest(args) -> int:
    checks = difftest_suite()
    for c in checks:
        print(c.line())
    return EXIT_OK if all(c.passed for c in checks) else EXIT_CHECK


def cmd_traintest(args) -> int:
    checks = traintest_suite(iterations=args.iterations)
    for c in checks:
        print(c.line())
    return EXIT_OK if all(c.passed for c in checks) else EXIT_CHECK


def cmd_bounds(args) -> int:
    cfg = _load(args)
    try:
        b = finite_time_bounds(cfg.elevation.gains, args.eta3, args.kappa)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    print(f"eta1 = {b.eta1:.6g}")
    print(f"eta2 = {b.eta2:.6g}")
    print(f"eta3 = {b.eta3:.6g}, kappa = {b.kappa:.6g}, h = {b.h:.6g}")
    if b.valid:
        print(f"|z_i|, |xi_i| <= {b.z_radius:.6g}")
        print(f"|e1| <= {b.e1_radius:.6g} rad ({math.degrees(b.e1_radius):.6g} deg)")
    else:
        print("bound not valid: eta1 or eta2 is not positive for these gains")
    return EXIT_OK


def cmd_config(args) -> int:
    text = dump_config(nominal_config())
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="helictl", description="Simulate and verify finite-time neural backstepping control of a helicopter bench.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def scenario_args(p):
        p.add_argument("--config", help="scenario YAML (default: built-in nominal scenario)")
        p.add_argument("--deg", action="store_true",
                       help="initial state and reference amplitudes in the config are degrees")
        p.add_argument("--t-end", type=float, dest="t_end")
        p.add_argument("--dt", type=float)

    p = sub.add_parser("simulate", help="run one closed-loop scenario")
    scenario_args(p)
    p.add_argument("--controller", choices=("proposed", "baseline"))
    p.add_argument("--out", default="out")
    p.add_argument("--csv", action="store_true")
    p.add_argument("--plot", action="store_true")
    p.add_argument("--diag", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="run proposed and baseline on one scenario")
    scenario_args(p)
    p.add_argument("--out", default="out")
    p.add_argument("--diag", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("difftest", help="differentiator accuracy suite")
    p.set_defaults(func=cmd_difftest)

    p = sub.add_parser("traintest", help="offline finite-time training suite")
    p.add_argument("--iterations", type=int, default=100_000)
    p.set_defaults(func=cmd_traintest)

    p = sub.add_parser("bounds", help="finite-time residual-set radius from the gains")
    scenario_args(p)
    p.add_argument("--eta3", type=float, required=True)
    p.add_argument("--kappa", type=float, default=0.5)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("config", help="print the nominal scenario as YAML")
    p.add_argument("--out")
    p.set_defaults(func=cmd_config)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, yaml.YAMLError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalOverflowError as exc:
        print(f"numerical overflow: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
