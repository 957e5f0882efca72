"""Command-line interface: ``simulate``, ``measure``, ``verify`` and ``plot``.

Exit codes: 0 ok, 1 verification failure, 2 configuration error,
3 numerical-domain error. Diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import verify as verify_mod
from .config import PRESETS, RunConfig, parse_lines, read_config_file
from .csvio import fmt, provenance_lines, read_csv, write_csv, write_series
from .errors import ConfigError, NumericalDomainError
from .nonmarkov import nonmarkov_measure, trajectory
from .plotting import STYLES, write_svg

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_DOMAIN = 0, 1, 2, 3


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("-c", "--config", help="key=value run configuration file")
    p.add_argument("--preset", choices=sorted(PRESETS), help="start from a figure preset")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key (repeatable)")


def load_config(args, extra: dict[str, str] | None = None) -> RunConfig:
    raw = read_config_file(args.config) if args.config else {}
    raw.update(parse_lines(args.set))
    raw.update({k: v for k, v in (extra or {}).items() if v is not None})
    return RunConfig.from_mapping(raw, preset=args.preset)


def simulate_columns(cfg: RunConfig) -> dict[str, np.ndarray]:
    state = cfg.state()
    columns = {}
    for W in cfg.W_values:
        ch = cfg.channel(W)
        fac = ch.factors(cfg.grid)
        for m in cfg.measures:
            name = f"{m.name}_W{W:g}" if cfg.sweeping_W else m.name
            columns[name] = trajectory(ch, state, m, cfg.grid, fac).values
    return columns


def cmd_simulate(args) -> int:
    cfg = load_config(args, {"output.csv": args.output, "output.svg": args.svg})
    columns = simulate_columns(cfg)
    comments = provenance_lines(cfg.digest, cfg.seed)
    path = cfg.outputs.get("csv")
    if path:
        write_series(path, cfg.grid.times, columns, comments)
    else:
        _write_series_stdout(cfg.grid.times, columns, comments)
    if cfg.outputs.get("svg"):
        if not path:
            raise ConfigError("an SVG needs a CSV output path as well")
        write_svg(cfg.outputs["svg"], read_csv(path), comments, style=args.style)
    return EXIT_OK


def _write_series_stdout(times, columns, comments) -> None:
    out = sys.stdout
    for c in comments:
        out.write(f"# {c}\n")
    out.write(",".join(["t", *columns]) + "\n")
    data = np.column_stack([times, *columns.values()])
    for row in data:
        out.write(",".join(fmt(v) for v in row) + "\n")


def cmd_measure(args) -> int:
    cfg = load_config(args, {"output.report": args.output, "output.states": args.states})
    if len(cfg.measures) != 1 or cfg.sweeping_W:
        raise ConfigError("measure takes exactly one coherence measure and no W sweep")
    measure = cfg.measures[0]
    rep = nonmarkov_measure(cfg.channel(), measure, cfg.search(), cfg.grid, cfg.threshold, per_state=True)
    st = rep.argmax_state
    lines = provenance_lines(cfg.digest, cfg.seed)
    lines += [
        f"measure={rep.measure_name}",
        f"measure_value={fmt(rep.measure_value)}",
        f"threshold={fmt(rep.threshold)}",
        f"dt={fmt(cfg.grid.dt)}",
        f"t_max={fmt(cfg.grid.t_max)}",
    ]
    if cfg.family == "ru":
        lines += [f"argmax_r1={fmt(st.r1)}", f"argmax_r2={fmt(st.r2)}", f"argmax_r3={fmt(st.r3)}"]
        header = ["r1", "r2", "measure_value"]
    else:
        lines += [f"argmax_a={fmt(st.a)}", f"argmax_b_abs={fmt(abs(st.b))}"]
        header = ["a", "b_abs", "measure_value"]
    lines.append(f"intervals={len(rep.intervals)}")
    lines += [f"interval_{i}={fmt(lo)},{fmt(hi)}" for i, (lo, hi) in enumerate(rep.intervals)]
    text = "\n".join(lines[2:]) + "\n"
    path = cfg.outputs.get("report")
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("".join(f"# {c}\n" for c in lines[:2]) + text)
    else:
        sys.stdout.write(text)
    if cfg.outputs.get("states"):
        write_csv(cfg.outputs["states"], header, rep.per_state_values, lines[:2])
    return EXIT_OK


def cmd_verify(args) -> int:
    suites = verify_mod.SUITES if args.suite == "all" else (args.suite,)
    checks = verify_mod.run(suites, seed=args.seed)
    text = verify_mod.report(checks)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"# seed={args.seed}\n" + text)
    sys.stdout.write(text)
    failed = [c for c in checks if not c.passed]
    for c in failed:
        print(f"failed: {c.suite}/{c.name} {c.detail}".rstrip(), file=sys.stderr)
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_plot(args) -> int:
    table = read_csv(args.csv)
    out = args.output or (args.csv.rsplit(".", 1)[0] + ".svg")
    write_svg(out, table, table.comments, style=args.style, title=args.title)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nmcoherence", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="coherence curves along a trajectory, as CSV (and optional SVG)")
    _add_config_args(p)
    p.add_argument("-o", "--output", help="CSV path (default: standard output)")
    p.add_argument("--svg", help="also render the curves to this SVG path")
    p.add_argument("--style", choices=sorted(STYLES), default="lines")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("measure", help="non-Markovianity measure maximised over initial states")
    _add_config_args(p)
    p.add_argument("-o", "--output", help="report path (default: standard output)")
    p.add_argument("--states", help="per-state CSV path")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("suite", choices=[*verify_mod.SUITES, "all"])
    p.add_argument("--seed", type=int, default=verify_mod.DEFAULT_SEED)
    p.add_argument("-o", "--output", help="also write the report to this path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot", help="render a simulate CSV to SVG")
    p.add_argument("csv")
    p.add_argument("-o", "--output", help="SVG path (default: CSV path with .svg)")
    p.add_argument("--style", choices=sorted(STYLES), default="lines")
    p.add_argument("--title")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalDomainError as exc:
        print(f"numerical domain error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
