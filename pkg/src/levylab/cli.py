"""Command-line entry point: ``levylab run | validate | constants``."""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import constants
from .scenarios import SCENARIOS, ConfigError, ScenarioConfig, run, validate

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _load(path, scenario=None) -> ScenarioConfig:
    cfg = ScenarioConfig.from_json(path) if path else ScenarioConfig()
    if scenario is not None:
        cfg.scenario = scenario
    return cfg


def _cmd_run(args) -> int:
    if args.scenario is not None and args.scenario not in SCENARIOS:
        print(f"unknown scenario {args.scenario!r}; expected one of {', '.join(SCENARIOS)}",
              file=sys.stderr)
        return EXIT_USAGE
    if args.scenario is None and args.config is None:
        print("run needs --scenario or --config", file=sys.stderr)
        return EXIT_USAGE
    cfg = _load(args.config, args.scenario)
    for name in ("seed", "replicas", "workers", "out"):
        value = getattr(args, name)
        if value is not None:
            setattr(cfg, name, value)
    problems = validate(cfg)
    if problems:
        for p in problems:
            print(f"invalid configuration: {p}", file=sys.stderr)
        return EXIT_USAGE
    code = run(cfg)
    out = cfg.resolved().out
    print(f"{cfg.scenario}: {'PASS' if code == EXIT_PASS else 'FAIL'} (report in {out})")
    return code


def _cmd_validate(args) -> int:
    problems = validate(_load(args.config))
    for p in problems:
        print(p)
    if not problems:
        print("ok")
    return EXIT_USAGE if problems else EXIT_PASS


_TABLE_ALPHA = (1.0, 1.25, 1.5, 1.75, 2.0)


def _table_rows(name: str):
    if name == "mq":
        yield ("q", "m_q")
        for q in np.arange(0.0, 8.01, 0.5):
            yield (q, constants.gaussian_abs_moment(q))
    elif name == "f":
        yield ("alpha", "r", "f_alpha")
        for alpha in _TABLE_ALPHA:
            for r in (0.001, 0.01, 0.05, 0.1, 0.2, 1 / 3, 0.5, 0.75, 0.9):
                yield (alpha, r, constants.f_alpha(alpha, r))
    elif name == "d":
        yield ("mu", "alpha", "q", "d")
        for alpha in (1.25, 1.5, 1.75):
            mu = alpha / (alpha - 1.0)
            for q in (2 * alpha - 1, 3.0, 4.0, 5.0):
                yield (mu, alpha, q, constants.d_const(mu, alpha, q))
    elif name == "F":
        yield ("mu", "alpha", "a", "F")
        for alpha in (1.25, 1.5, 1.75):
            mu = alpha / (alpha - 1.0)
            for a in (0.1, 0.25, 0.5, 0.75, 1.0):
                yield (mu, alpha, a, constants.F_const(mu, alpha, a))
    elif name == "gamma":
        yield ("alpha", "q", "gamma")
        for alpha in _TABLE_ALPHA:
            for q in (0.5, 1.0, 2.0, 3.0, 4.0, 6.0):
                yield (alpha, q, constants.gamma_exponent(alpha, q))


def _cmd_constants(args) -> int:
    out = csv.writer(sys.stdout, lineterminator="\n")
    for row in _table_rows(args.table):
        out.writerow([repr(float(v)) if not isinstance(v, str) else v for v in row])
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="levylab", description="Random walks in a one-dimensional Lévy random "
                "medium: scenario runner and constant tables.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run one scenario and write summary.json plus CSVs")
    r.add_argument("--scenario", help=f"one of {', '.join(SCENARIOS)}")
    r.add_argument("--config", help="JSON config; flags override its fields")
    r.add_argument("--seed", type=int)
    r.add_argument("--replicas", type=int)
    r.add_argument("--workers", type=int)
    r.add_argument("--out", help="output directory (default $LEVYLAB_OUT or ./levylab-out/<id>)")
    r.set_defaults(func=_cmd_run)

    v = sub.add_parser("validate", help="list violated hypotheses of a config")
    v.add_argument("--config", required=True)
    v.set_defaults(func=_cmd_validate)

    c = sub.add_parser("constants", help="dump a table of constants as CSV")
    c.add_argument("--table", required=True, choices=("mq", "f", "d", "F", "gamma"))
    c.set_defaults(func=_cmd_constants)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        print("interrupted; partial summary written", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
