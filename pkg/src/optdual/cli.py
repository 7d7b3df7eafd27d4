"""Command-line runner for recovery experiments and guarantee reports.

Usage::

    python -m optdual recover --config cfg.json --out results/
    python -m optdual convergence --config cfg.json --out results/ --gnuplot
    python -m optdual noise-sweep --trials 5 --out results/
    python -m optdual sparsity-sweep --trials 20 --out results/
    python -m optdual theory [--config params.json]

Exit codes: 0 on success, 2 on a configuration error, 3 when the solver
produced non-finite iterates, 1 on any other library error.
"""

import argparse
import json
import logging
import os
import sys

from .errors import BadParams, ConfigError, NonFinite, OptDualError
from .experiments import (
    ExperimentConfig,
    gnuplot_script,
    remarks_report,
    run_convergence,
    run_noise_sweep,
    run_recover,
    run_sparsity_sweep,
    run_theory,
    write_csv,
)

log = logging.getLogger("optdual")

EXIT_OTHER = 1
EXIT_CONFIG = 2
EXIT_NONFINITE = 3


def _dump_json(path, obj):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    with open(path, "w") as fp:
        fp.write(text)
    return text


def _load_config(args):
    cfg = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    overrides = {}
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.mode is not None:
        overrides["mode"] = args.mode
    if args.trials is not None:
        overrides["trials"] = args.trials
    return cfg.replace(**overrides) if overrides else cfg


def _modes(args):
    from .experiments import BOTH_MODES

    return (args.mode,) if args.mode else BOTH_MODES


def cmd_recover(args):
    cfg = _load_config(args)
    record, result, frame, model = run_recover(cfg)
    frame.save(os.path.join(args.out, "frame.odmx"))
    model.save(os.path.join(args.out, "sensing.odmx"))
    out = {"config": cfg.to_dict(), "trial": record.to_dict(), "result": result.to_dict()}
    _dump_json(os.path.join(args.out, "recover.json"), out)
    print(f"seed={record.seed} mode={record.mode} relative_error={record.relative_error:.6e} "
          f"outer_iterations={record.outer_iterations} converged={record.converged}")


def cmd_convergence(args):
    cfg = _load_config(args)
    rows = run_convergence(cfg)
    cols = ["iteration", "error_optimal_dual", "error_canonical", "seed"]
    write_csv(os.path.join(args.out, "convergence.csv"), rows, cols)
    if args.gnuplot:
        with open(os.path.join(args.out, "convergence.gp"), "w") as fp:
            fp.write(gnuplot_script("convergence.csv", 1, [2, 3], "outer iteration", "relative error", logy=True))
    print(f"wrote {len(rows)} rows to {os.path.join(args.out, 'convergence.csv')}")


def _sweep_columns(key, modes, extra):
    cols = [key]
    for mode in modes:
        tag = mode.replace("-", "_")
        cols += [f"mean_{tag}", f"std_{tag}"]
    return cols + extra


TRIAL_COLUMNS = ["trial_index", "seed", "mode", "s", "sigma", "relative_error", "outer_iterations", "converged"]


def cmd_noise_sweep(args):
    cfg = _load_config(args)
    modes = _modes(args)
    rows, trials = run_noise_sweep(cfg, modes=modes)
    write_csv(os.path.join(args.out, "noise_sweep.csv"), rows,
              _sweep_columns("noise_level", modes, ["base_seed", "trials"]))
    write_csv(os.path.join(args.out, "noise_sweep_trials.csv"), trials, ["noise_level"] + TRIAL_COLUMNS)
    if args.gnuplot:
        ys = [2 + 2 * i for i in range(len(modes))]
        with open(os.path.join(args.out, "noise_sweep.gp"), "w") as fp:
            fp.write(gnuplot_script("noise_sweep.csv", 1, ys, "relative noise level", "relative error"))
    print(f"wrote {len(rows)} levels to {os.path.join(args.out, 'noise_sweep.csv')}")


def cmd_sparsity_sweep(args):
    cfg = _load_config(args)
    modes = _modes(args)
    rows, trials = run_sparsity_sweep(cfg, modes=modes)
    write_csv(os.path.join(args.out, "sparsity_sweep.csv"), rows,
              _sweep_columns("rho", modes, ["s", "base_seed", "trials"]))
    write_csv(os.path.join(args.out, "sparsity_sweep_trials.csv"), trials, ["rho"] + TRIAL_COLUMNS)
    if args.gnuplot:
        ys = [2 + 2 * i for i in range(len(modes))]
        with open(os.path.join(args.out, "sparsity_sweep.gp"), "w") as fp:
            fp.write(gnuplot_script("sparsity_sweep.csv", 1, ys, "relative sparsity s/m", "relative error"))
    print(f"wrote {len(rows)} points to {os.path.join(args.out, 'sparsity_sweep.csv')}")


def cmd_theory(args):
    if args.config:
        try:
            with open(args.config) as fp:
                params = json.load(fp)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read {args.config}: {exc}") from exc
        out = run_theory(params)
    else:
        out = remarks_report()
    text = _dump_json(os.path.join(args.out, "theory.json"), out)
    sys.stdout.write(text)


COMMANDS = {
    "recover": cmd_recover,
    "convergence": cmd_convergence,
    "noise-sweep": cmd_noise_sweep,
    "sparsity-sweep": cmd_sparsity_sweep,
    "theory": cmd_theory,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="optdual", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", default=".", help="output directory (default: .)")
        p.add_argument("--seed", type=int, help="override base_seed")
        p.add_argument("--mode", choices=["optimal-dual", "canonical"], help="solver mode")
        p.add_argument("--trials", type=int, help="override the number of trials")
        p.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        os.makedirs(args.out, exist_ok=True)
        COMMANDS[args.command](args)
    except (ConfigError, BadParams) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonFinite as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_NONFINITE
    except OptDualError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OTHER
    return 0


if __name__ == "__main__":
    sys.exit(main())
