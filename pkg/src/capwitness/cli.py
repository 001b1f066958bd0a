"""Command-line entry point.

Exit codes: 0 ok, 1 usage, 2 data error, 3 numerical error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .capacity import brute_force_capacity, capacity_cb, ErrorPair, optimal_prior
from .config import RunConfig, default_out_dir, parse_grid
from .errors import DataError, NumericalError
from .pipeline import param_uncertainty, run_simulation
from .reconstruction import SANITIZE_MODES
from .report import (comparison_rows, emit_plot_data, emit_report, format_comparison,
                     format_theory, theory_curve)
from .tables import CHANNEL_KINDS, bundled_table, ingest_table, recompute_from_table

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="capwitness", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--seed", type=int, default=None, help="random seed (default 0)")
    p.add_argument("--out-dir", default=None,
                   help="output directory (default $CAPWITNESS_OUT_DIR or ./capwitness-out)")
    p.add_argument("--sanitize", choices=SANITIZE_MODES, default=None,
                   help="negative-probability handling (reproduce: paper-abs, simulate: clamp)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    t = sub.add_parser("theory", help="closed-form capacity curves")
    t.add_argument("--channel", choices=CHANNEL_KINDS, required=True)
    t.add_argument("--grid", default=None, help="start:stop:step or a,b,c")
    t.add_argument("--out", default=None, help="output file (default <out-dir>/theory_<channel>.csv)")

    s = sub.add_parser("simulate", help="simulate the full measurement pipeline")
    s.add_argument("--config", default=None, help="key = value run configuration file")
    s.add_argument("--channel", choices=CHANNEL_KINDS)
    s.add_argument("--grid")
    s.add_argument("--fidelity", type=float)
    s.add_argument("--counts-per-axis", type=float)
    s.add_argument("--flux", type=float)
    s.add_argument("--integration-time", type=float)
    s.add_argument("--eps-channel", type=float)
    s.add_argument("--trials", type=int)
    s.add_argument("--format", choices=("csv", "jsonl"))

    r = sub.add_parser("reproduce", help="recompute capacities from published tables")
    r.add_argument("--table", action="append", default=None,
                   help="table CSV (repeatable); default: all bundled tables")
    r.add_argument("--channel", choices=CHANNEL_KINDS, default=None,
                   help="channel kind of --table (default: inferred from the file name)")
    r.add_argument("--draws", type=int, default=10_000)
    r.add_argument("--format", choices=("csv", "jsonl"), default="csv")

    o = sub.add_parser("oracle-check", help="closed-form capacity vs brute-force maximisation")
    o.add_argument("--pairs", type=int, default=1000)
    o.add_argument("--resolution", type=float, default=1e-5)
    return p


def _out_dir(args) -> Path:
    d = Path(args.out_dir or default_out_dir())
    d.mkdir(parents=True, exist_ok=True)
    return d


def cmd_theory(args) -> int:
    default = "0:0.3:0.015" if args.channel == "d" else "0:1:0.05"
    grid = parse_grid(args.grid or default)
    rows = theory_curve(args.channel, grid)
    out = Path(args.out) if args.out else _out_dir(args) / f"theory_{args.channel}.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(format_theory(rows), encoding="utf-8")
    print(f"wrote {len(rows)} rows to {out}")
    return EXIT_OK


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    overrides = {
        "channel": args.channel, "grid": args.grid, "fidelity": args.fidelity,
        "counts_per_axis": args.counts_per_axis, "flux": args.flux,
        "integration_time": args.integration_time, "eps_channel": args.eps_channel,
        "trials": args.trials, "format": args.format, "seed": args.seed,
        "sanitize": args.sanitize, "out_dir": args.out_dir,
    }
    data = cfg.as_dict()
    data.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**data)


def cmd_simulate(args) -> int:
    cfg = _config_from_args(args)
    out = Path(cfg.out_dir or default_out_dir())
    out.mkdir(parents=True, exist_ok=True)
    reports = run_simulation(cfg)
    ext = "jsonl" if cfg.format == "jsonl" else "csv"
    path = emit_report(reports, out / f"simulate_{cfg.channel}.{ext}", cfg.format)
    emit_plot_data(reports, cfg.channel, out / "plot")
    cfg.save(out / f"simulate_{cfg.channel}.cfg")
    for r in reports:
        print(f"{cfg.channel} param={r.param:.4g}  C_D={r.c_d:.5f} +- {r.c_d_std:.5f}  winner={r.winner}")
    print(f"wrote {path}")
    return EXIT_OK


def _infer_kind(path: Path) -> str:
    stem = path.stem.lower()
    for kind in ("pd", "ad", "d"):
        if stem == kind or stem.startswith(kind + "_") or stem.endswith("_" + kind):
            return kind
    raise DataError(f"cannot infer channel kind from {path.name}; pass --channel")


def cmd_reproduce(args) -> int:
    mode = args.sanitize or "paper-abs"
    seed = 0 if args.seed is None else args.seed
    if args.table:
        tables = [(Path(t), args.channel or _infer_kind(Path(t))) for t in args.table]
    else:
        tables = [(bundled_table(k), k) for k in CHANNEL_KINDS]
    out = _out_dir(args)
    for path, kind in tables:
        rows = ingest_table(path, kind)
        reports = recompute_from_table(rows, mode, args.draws, seed)
        for r in reports:
            r.extra["param_std"] = param_uncertainty(kind, r.param)
        ext = "jsonl" if args.format == "jsonl" else "csv"
        rep = emit_report(reports, out / f"reproduce_{kind}.{ext}", args.format)
        emit_plot_data(reports, kind, out / "plot")
        # The bundled AD table repeats rows of the D table, so its theory comparison is informational.
        cmp_rows = comparison_rows(reports, kind, informational=(kind == "ad"))
        (out / f"compare_{kind}.csv").write_text(format_comparison(cmp_rows), encoding="utf-8")
        worst = max(abs(r["diff"]) for r in cmp_rows)
        print(f"{kind}: {len(rows)} rows, sanitize={mode}, max |C_D - theory| = {worst:.4f} -> {rep}")
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    rng = np.random.default_rng(0 if args.seed is None else args.seed)
    pairs = []
    while len(pairs) < args.pairs:
        e0, e1 = rng.random(2)
        if e0 <= 0.5 and e0 <= e1 and e0 <= 1 - e1 and 1 - e0 - e1 > 1e-3:
            pairs.append((float(e0), float(e1)))
    dc = dp = 0.0
    for e0, e1 in pairs:
        e = ErrorPair(e0, e1)
        q = np.array([[1 - e0, e1], [e0, 1 - e1]])
        c_bf, p_bf = brute_force_capacity(q, args.resolution)
        dc = max(dc, abs(capacity_cb(e) - c_bf))
        dp = max(dp, abs(optimal_prior(e).p0 - p_bf))
    print(f"pairs={len(pairs)}  max|C_B - brute force|={dc:.3e}  max|p0 - argmax|={dp:.3e}")
    if dc > 1e-8 or dp > 1e-4:
        print("oracle check FAILED", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


COMMANDS = {"theory": cmd_theory, "simulate": cmd_simulate, "reproduce": cmd_reproduce,
            "oracle-check": cmd_oracle_check}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("capwitness: a subcommand is required "
                             f"({', '.join(COMMANDS)})")
    except UsageError as exc:
        print(exc, file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericalError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
