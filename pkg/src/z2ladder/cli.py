"""Command-line interface.

Subcommands:

  run                    execute an experiment config, write CSV/JSON plus
                         figures (suppress with --no-figures)
  compare-golden         field-wise comparison of a result against a golden
  list-experiments       available experiment kinds
  print-config-template  editable default config for a kind

Exit codes: 0 success, 1 comparison failure, 2 invalid config/parameters,
3 numerical failure, 4 capacity exceeded. Z2LADDER_WORKERS and
Z2LADDER_OUTDIR override worker count and output directory.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import EXPERIMENT_KINDS, ExperimentConfig, config_template
from .errors import Z2LadderError
from .goldens import Tolerances, compare_golden
from .runner import run_experiment


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="z2ladder",
        description="Spinon-vison interferometry simulator for quasi-1D "
                    "Z2 gauge ladders")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a JSON config")
    p_run.add_argument("config", help="path to the experiment config")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--workers", type=int, default=None,
                       help="worker processes (overrides the config)")
    p_run.add_argument("--seed", type=int, default=None,
                       help="master seed (overrides the config)")
    figs = p_run.add_mutually_exclusive_group()
    figs.add_argument("--figures", dest="figures", action="store_true",
                      default=True, help="render figures (default)")
    figs.add_argument("--no-figures", dest="figures", action="store_false")

    p_cmp = sub.add_parser("compare-golden",
                           help="compare a result file against a golden file")
    p_cmp.add_argument("result")
    p_cmp.add_argument("golden")
    p_cmp.add_argument("--rel", type=float, default=1e-9)
    p_cmp.add_argument("--abs", type=float, default=1e-12, dest="absolute")
    p_cmp.add_argument("--stat-sigma", type=float, default=3.0)

    sub.add_parser("list-experiments", help="list experiment kinds")

    p_tpl = sub.add_parser("print-config-template",
                           help="print an editable config for a kind")
    p_tpl.add_argument("kind", choices=EXPERIMENT_KINDS)
    p_tpl.add_argument("--out", default=None, help="write to file instead of stdout")

    return parser


def _cmd_run(args) -> int:
    config = ExperimentConfig.load(args.config)
    overrides = {}
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        config = ExperimentConfig.from_dict({**config.to_dict(), **overrides})
    info = run_experiment(config, output_dir=args.out)
    for path in info["outputs"]:
        print(f"wrote {path}")
    if args.figures:
        from . import plots  # matplotlib import deferred to first use

        for fig_path in plots.render_for_experiment(config.experiment,
                                                    info["outputs"]):
            print(f"wrote {fig_path}")
    print(f"wrote {info['sidecar']}")
    return 0


def _cmd_compare(args) -> int:
    tol = Tolerances(rel=args.rel, abs=args.absolute, stat_sigma=args.stat_sigma)
    report = compare_golden(args.result, args.golden, tol)
    print(report.summary())
    return 0 if report.passed else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "compare-golden":
            return _cmd_compare(args)
        if args.command == "list-experiments":
            for kind in EXPERIMENT_KINDS:
                print(kind)
            return 0
        if args.command == "print-config-template":
            text = json.dumps(config_template(args.kind), indent=2, sort_keys=True)
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(text + "\n")
            else:
                print(text)
            return 0
        raise AssertionError(f"unhandled command {args.command!r}")
    except Z2LadderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
