"""Command-line entry point.

Subcommands:
  run               execute a run described by a JSON config file
  generate-dataset  build a synthetic dataset and write it to a file
  list              show every registered component by kind
  report            re-render a stored report.json as markdown or CSV

Exit codes: 0 success, 1 validation problem (bad config, unknown name,
missing file), 2 unexpected runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys

from cfbench import registry
from cfbench.config import ConfigError, parse_config
from cfbench.datasets import DatasetError, ensure_dataset
from cfbench.explainers import ExplainerError
from cfbench.oracles import OracleError
from cfbench.registry import RegistryError
from cfbench.report import load_report, render_csv, render_markdown
from cfbench.runner import execute

VALIDATION_ERRORS = (
    ConfigError,
    DatasetError,
    OracleError,
    ExplainerError,
    RegistryError,
    FileNotFoundError,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfbench",
        description="Benchmark counterfactual explainers for graph classifiers.",
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="log progress to stderr"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a run from a JSON config")
    p_run.add_argument("--config", required=True, help="path to the run config JSON")
    p_run.add_argument("--seed", type=int, help="override the config's seed")
    p_run.add_argument("--parallel", type=int, help="override the worker count")
    p_run.add_argument("--out", help="override the output directory")

    p_gen = sub.add_parser("generate-dataset", help="generate a dataset file")
    p_gen.add_argument("--name", required=True, help="registered dataset name")
    p_gen.add_argument(
        "--param",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="generator parameter (repeatable); values parse as JSON, e.g. n=100",
    )
    p_gen.add_argument("--out", required=True, help="where to write the dataset")

    sub.add_parser("list", help="print registered components by kind")

    p_rep = sub.add_parser("report", help="re-render a stored report")
    p_rep.add_argument("--input", required=True, help="path to a report.json")
    p_rep.add_argument(
        "--format", required=True, choices=("markdown", "csv"), help="output format"
    )
    return parser


def _parse_param(text: str) -> tuple[str, object]:
    if "=" not in text:
        raise ConfigError(f"--param {text!r}: expected KEY=VALUE")
    key, _, value = text.partition("=")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def _cmd_run(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        cfg = parse_config(fh.read())
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.parallel is not None:
        if args.parallel < 1:
            raise ConfigError(f"--parallel must be positive, got {args.parallel}")
        cfg = dataclasses.replace(cfg, parallelism=args.parallel)
    if args.out is not None:
        cfg = dataclasses.replace(cfg, output_dir=args.out)
    report = execute(cfg)
    print(f"run {report.run_id}: {sum(len(r) for r in report.records.values())} records "
          f"in {report.total_wall_time_s:.2f}s -> {cfg.output_dir}/{cfg.run_id}")
    print(render_markdown(report), end="")
    return 0


def _cmd_generate_dataset(args) -> int:
    params = dict(_parse_param(p) for p in args.param)
    dataset = ensure_dataset(args.name, params, data_dir=".", path=args.out)
    c0, c1 = dataset.class_counts()
    print(f"wrote {args.out}: {len(dataset)} instances ({c0} class 0, {c1} class 1)")
    return 0


def _cmd_list(args) -> int:
    for kind in registry.KINDS:
        print(f"{kind}:")
        for name in registry.names(kind):
            print(f"  {name}")
    return 0


def _cmd_report(args) -> int:
    report = load_report(args.input)
    if args.format == "markdown":
        print(render_markdown(report), end="")
    else:
        print(render_csv(report), end="")
    return 0


COMMANDS = {
    "run": _cmd_run,
    "generate-dataset": _cmd_generate_dataset,
    "list": _cmd_list,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive catch-all
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
