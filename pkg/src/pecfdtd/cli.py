"""Command-line entry point: ``pecfdtd <subcommand> --config FILE``.

Exit codes: 0 success, 1 invalid input (config, geometry, files, usage),
2 numerical failure (instability, extension divergence).
"""

import argparse
import os
import sys
import time

from . import harness
from .config import load_config
from .emcore import run
from .errors import NumericalError, ValidationError
from .snapshot import SnapshotHeader, snapshot_diff, write_heatmap, write_snapshot

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; ours is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="pecfdtd", description="2D TMz scattering off perfect conductors.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, help_text, needs_config=True):
        p = sub.add_parser(name, help=help_text)
        if needs_config:
            p.add_argument("--config", required=True, help="INI configuration file")
            p.add_argument("--override", action="append", default=[], metavar="SECTION.KEY=VALUE",
                           help="override one config value (repeatable)")
        p.add_argument("--out", default=".", help="output directory (default: current)")
        p.add_argument("--threads", type=int, default=1, help="worker processes for studies")
        return p

    add("run", "run one simulation, write snapshots and heatmaps")
    add("convergence", "error and order table against the reference resolution")
    add("cfl-study", "amplitude retention across CFL numbers")
    add("longtime", "peak Ez over long runs")
    p = add("snapshot-diff", "compare two snapshot files", needs_config=False)
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--tol", type=float, default=None, help="exit 1 if the max difference exceeds this")
    return parser


def _write(out, name, text):
    path = os.path.join(out, name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path


def cmd_run(cfg, args):
    t0 = time.perf_counter()
    solver, state = run(cfg, cfg.scheme)
    si, sj = cfg.domain_slices(solver.grid)
    g = solver.grid
    sub = g.subgrid(si.start or 0, sj.start or 0, len(range(*si.indices(g.nx))), len(range(*sj.indices(g.ny))))
    fields = state.fields()
    for name in cfg.output_fields:
        arr = fields[name][si, sj]
        write_snapshot(arr, SnapshotHeader.for_grid(sub, state.t, name),
                       os.path.join(args.out, f"{name}.txt"))
        if cfg.heatmaps:
            write_heatmap(arr, os.path.join(args.out, f"{name}.ppm"), cfg.heatmap_range)
    print(f"t = {state.t:.6g} after {cfg.solver_params().n_steps} steps on 1/{cfg.resolution} "
          f"({time.perf_counter() - t0:.1f} s); wrote {', '.join(cfg.output_fields)} to {args.out}")


def cmd_convergence(cfg, args):
    reports, _ = harness.convergence_study(cfg, workers=args.threads)
    table = harness.convergence_table(reports)
    print(table, end="")
    _write(args.out, "convergence.txt", table)
    _write(args.out, "convergence.csv", harness.convergence_csv(reports))


def cmd_cfl(cfg, args):
    rows, _ = harness.cfl_study(cfg, workers=args.threads, resolution=cfg.resolution)
    table = harness.cfl_table(rows)
    print(table, end="")
    _write(args.out, "cfl.txt", table)
    _write(args.out, "cfl.csv", harness.cfl_csv(rows))


def cmd_longtime(cfg, args):
    rows = harness.longtime_study(cfg, resolution=cfg.resolution)
    table = harness.longtime_table(rows)
    print(table, end="")
    _write(args.out, "longtime.txt", table)
    _write(args.out, "longtime.csv", harness.longtime_csv(rows))


def cmd_diff(args):
    linf, mean = snapshot_diff(args.a, args.b)
    print(f"max |a - b| = {linf:.17g}\nmean |a - b| = {mean:.17g}")
    if args.tol is not None and linf > args.tol:
        raise ValidationError(f"snapshots differ by {linf:g} > tol {args.tol:g}")


COMMANDS = {"run": cmd_run, "convergence": cmd_convergence, "cfl-study": cmd_cfl, "longtime": cmd_longtime}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID
    try:
        if args.threads < 1:
            raise ValidationError("--threads must be at least 1")
        os.makedirs(args.out, exist_ok=True)
        if args.command == "snapshot-diff":
            cmd_diff(args)
        else:
            cfg = load_config(args.config, args.override)
            COMMANDS[args.command](cfg, args)
    except ValidationError as exc:
        print(f"pecfdtd: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"pecfdtd: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"pecfdtd: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
