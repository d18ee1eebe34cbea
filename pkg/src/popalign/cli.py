"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error, 3 a bound failed to
bracket the exact alignment (an implementation bug, never a property of the
data).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import __version__, selftest
from .errors import InvariantViolation, PopAlignError
from .io import read_matrix, write_edge_list, write_matrix_market
from .report import (
    AGGREGATE_COLUMNS,
    AnalyzeOptions,
    SweepCell,
    analyze,
    build_grid,
    canonical,
    emit_plot_data,
    generate,
    sweep,
    to_json,
    violations,
    write_csv,
)
from .synth import DistributionSpec, rank_frequency, sample_item_weights

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INVARIANT = 0, 1, 2, 3
SEED_ENV = "POPALIGN_SEED"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"k values must be positive integers, got {text!r}")
    return values


def _size(text: str) -> tuple[int, int]:
    try:
        n, m = text.lower().split("x")
        return int(n), int(m)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NxM, got {text!r}")


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _subset_options(spec: str) -> dict:
    if spec == "top":
        return {"subset": "top"}
    if spec == "exhaustive":
        return {"subset": "exhaustive"}
    if spec.startswith("explicit:"):
        ids = tuple(x for x in spec[len("explicit:"):].split(",") if x)
        return {"subset": "explicit", "explicit_items": ids}
    raise argparse.ArgumentTypeError(f"--subset must be top, exhaustive or explicit:<ids>, got {spec!r}")


def cmd_analyze(args) -> int:
    Y = read_matrix(args.input, args.format)
    opts = AnalyzeOptions(
        k_list=args.k,
        rank_tol=args.rank_tol,
        drop_zero_items=args.drop_zero_items,
        seed=args.seed,
        dataset_id=os.path.basename(args.input),
        **args.subset,
    )
    report = analyze(Y, opts)
    _write_text(args.out, to_json(report))
    bad = violations(report)
    if bad:
        raise InvariantViolation("bracket violations: " + ", ".join(bad))
    return EXIT_OK


def cmd_generate(args) -> int:
    cell = SweepCell(args.law, args.n, args.m, args.seed, args.density_cap)
    Y = generate(cell)
    if args.out in (None, "-"):
        stream = sys.stdout
    else:
        stream = open(args.out, "w", encoding="utf-8", newline="")
    try:
        if args.format == "mm":
            write_matrix_market(Y, stream)
        else:
            write_edge_list(Y, stream, args.format)
    finally:
        if stream is not sys.stdout:
            stream.close()
    return EXIT_OK


def cmd_sweep(args) -> int:
    cells = build_grid(args.law or [], args.size or [], args.seed)
    results, rows = sweep(cells, args.k, workers=args.workers)
    os.makedirs(args.out, exist_ok=True)
    _write_text(os.path.join(args.out, "reports.json"),
                json.dumps(canonical(results), sort_keys=True, indent=2) + "\n")
    write_csv(os.path.join(args.out, "aggregate.csv"), AGGREGATE_COLUMNS, rows)
    for res in results:
        if res["error"]:
            logging.getLogger("popalign").warning("cell %s failed: %s", res["cell"], res["error"])
    bad = [f"{res['cell']}:{v}" for res in results if res["report"] for v in violations(res["report"])]
    if bad:
        raise InvariantViolation("bracket violations: " + ", ".join(bad))
    return EXIT_OK


def cmd_plot_data(args) -> int:
    report = None
    series = {}
    if args.report:
        with open(args.report, encoding="utf-8") as fh:
            report = json.load(fh)
    if args.input:
        Y = read_matrix(args.input, args.format)
        series["items"] = rank_frequency([int(x) for x in Y.item_degrees()])
    for law in args.law or []:
        spec = DistributionSpec.parse(law, args.m, seed=args.seed)
        series[spec.kind] = rank_frequency(sample_item_weights(spec).tolist())
    if report is None and not series:
        raise argparse.ArgumentTypeError("plot-data needs --report, --input or --law")
    for path in emit_plot_data(args.out, report=report, rank_freq=series):
        print(path)
    return EXIT_OK


def cmd_selftest(args) -> int:
    return EXIT_OK if selftest.run() else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="popalign", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common_input(sp):
        sp.add_argument("--input", required=True, help="edge list or MatrixMarket file")
        sp.add_argument("--format", choices=("csv", "tsv", "mm"), default="csv")

    a = sub.add_parser("analyze", help="compute every bound for a matrix")
    common_input(a)
    a.add_argument("--k", type=_int_list, default=(1, 2, 3), help="comma-separated k values")
    a.add_argument("--subset", type=_subset_options, default={"subset": "top"},
                   help="top | exhaustive | explicit:<item ids>")
    a.add_argument("--seed", type=int, default=None)
    a.add_argument("--rank-tol", type=float, default=None)
    a.add_argument("--drop-zero-items", action="store_true")
    a.add_argument("--out", default=None, help="report path (default stdout)")
    a.set_defaults(func=cmd_analyze)

    g = sub.add_parser("generate", help="sample a synthetic interaction matrix")
    g.add_argument("--law", required=True, help="e.g. power_law:1.5 or log_normal:2.0,1.0")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--seed", type=int, default=_default_seed())
    g.add_argument("--density-cap", type=float, default=1.0)
    g.add_argument("--format", choices=("csv", "tsv", "mm"), default="csv")
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("sweep", help="analyze a grid of synthetic instances")
    s.add_argument("--law", action="append", help="repeatable distribution spec")
    s.add_argument("--size", action="append", type=_size, help="repeatable NxM")
    s.add_argument("--k", type=_int_list, default=(1,))
    s.add_argument("--seed", type=int, default=_default_seed())
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_sweep)

    d = sub.add_parser("plot-data", help="emit CSV series for plotting")
    d.add_argument("--report", help="JSON report from analyze")
    d.add_argument("--input", help="matrix whose item rank-frequency to emit")
    d.add_argument("--format", choices=("csv", "tsv", "mm"), default="csv")
    d.add_argument("--law", action="append", help="sample a law and emit its rank-frequency")
    d.add_argument("--m", type=int, default=10_000)
    d.add_argument("--seed", type=int, default=_default_seed())
    d.add_argument("--out", required=True, help="output directory")
    d.set_defaults(func=cmd_plot_data)

    t = sub.add_parser("selftest", help="run oracle checks on built-in instances")
    t.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as exc:
        print(f"popalign: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantViolation as exc:
        print(f"popalign: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (PopAlignError, OSError) as exc:
        print(f"popalign: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
