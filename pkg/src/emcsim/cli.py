"""Command line entry point: ``emcsim {simulate,benchmark,stability,sweep}``."""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import harness, netmodel
from .config import load_config
from .harness import ConfigError
from .stability import sweep as stability_sweep


def _float_list(value):
    try:
        out = [float(v) for v in value.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {value!r}") from exc
    if not out:
        raise argparse.ArgumentTypeError("list cannot be empty")
    return out


def build_parser():
    parser = argparse.ArgumentParser(prog="emcsim", description="EMC / PI networked DC-motor speed loop simulator")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="scenario INI file, or a preset name (distrej, critical, benchmark)")
    common.add_argument("--seed", type=lambda v: int(v, 0), default=None, help="override timing.seed")
    common.add_argument("--out-dir", default=".", help="directory for CSV outputs (default: current)")
    common.add_argument("--format", choices=["csv"], default="csv", help="output format")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="run one scenario")
    sub.add_parser("benchmark", parents=[common], help="run EMC and PI on the same timing trace")
    sub.add_parser("stability", parents=[common], help="eigenvalue sweep over the sampling range")
    p_sweep = sub.add_parser("sweep", parents=[common], help="critical-timing family over several ts_max")
    p_sweep.add_argument("--ts-max", type=_float_list, default=None,
                         help="comma-separated upper sampling bounds (default: sweep.ts_max from the config)")
    return parser


def _print_metrics(label, m):
    print(f"{label}: rmse_tracking={m.rmse_tracking:.6g} rms_model_error={m.rms_model_error:.6g} "
          f"max_abs_model_error={m.max_abs_model_error:.6g} settling_time={m.settling_time:.6g} "
          f"window=[{m.window_start:g}, {m.window_end:.6g}]")


def _simulate(cfg, out):
    sc = cfg.scenario
    trace = netmodel.generate_trace(sc.timing, sc.duration)
    records, metrics = harness.run_scenario(sc, trace)
    path = out / Path(sc.output_path).name
    harness.write_csv(records, path)
    netmodel.write_trace_csv(trace, out / f"{sc.name}_trace.csv")
    harness.write_metrics_csv([(sc.controller.kind, metrics)], out / f"{sc.name}_metrics.csv")
    _print_metrics(sc.name, metrics)
    print(f"wrote {path}")


def _benchmark(cfg, out):
    sc_emc, sc_pi = cfg.with_controller("emc"), cfg.with_controller("pi")
    (rec_e, m_e), (rec_p, m_p) = harness.run_pair(sc_emc, sc_pi)
    name = cfg.scenario.name
    harness.write_csv(rec_e, out / f"{name}_emc.csv")
    harness.write_csv(rec_p, out / f"{name}_pi.csv")
    harness.write_metrics_csv([("emc", m_e), ("pi", m_p)], out / f"{name}_metrics.csv")
    _print_metrics("emc", m_e)
    _print_metrics("pi", m_p)
    print(f"rmse ratio emc/pi = {m_e.rmse_tracking / m_p.rmse_tracking:.4f}")


def _stability(cfg, out):
    sc = cfg.scenario
    ts_min, ts_max, n = cfg.stability
    report = stability_sweep(cfg.emc.spec, sc.plant, ts_min, ts_max, n, cfg.emc.options)
    path = out / f"{sc.name}_stability.csv"
    harness.write_csv(report, path)
    print(f"all_stable={report.all_stable} max_modulus={report.max_modulus:.6g} "
          f"max|lambda_N|={report.max_group_modulus('N'):.6g} placement_error={report.placement_error:.3g}")
    print(f"wrote {path}")


def _sweep(cfg, out, ts_max_values):
    values = ts_max_values or cfg.sweep_ts_max
    if not values:
        raise ConfigError("sweep.ts_max: no values given (use --ts-max or the [sweep] section)")
    results = []
    for sc in harness.timing_family(cfg.scenario, values):
        records, metrics = harness.run_scenario(sc)
        harness.write_csv(records, out / f"{sc.name}.csv")
        results.append((sc.name, metrics))
        _print_metrics(sc.name, metrics)
    harness.write_metrics_csv(results, out / f"{cfg.scenario.name}_sweep_metrics.csv")


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "simulate":
            _simulate(cfg, out)
        elif args.command == "benchmark":
            _benchmark(cfg, out)
        elif args.command == "stability":
            _stability(cfg, out)
        else:
            _sweep(cfg, out, args.ts_max)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"emcsim: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
