"""Regenerate the golden fixture used by tests/test_report_cli.py.

Run only after an intentional change to the report; the new report is
self-checked (no bracket violations) before it is written.
"""

import argparse
import os

from popalign.io import read_matrix, write_edge_list
from popalign.report import AnalyzeOptions, SweepCell, analyze, generate, to_json, violations

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "tests", "data")
CELL = SweepCell("log_normal:2.0,1.0", 40, 30, seed=17)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default=DATA)
    args = p.parse_args()
    os.makedirs(args.out, exist_ok=True)
    edges = os.path.join(args.out, "lognormal_40x30.csv")
    with open(edges, "w", encoding="utf-8", newline="") as fh:
        write_edge_list(generate(CELL), fh)
    Y = read_matrix(edges, "csv")
    report = analyze(Y, AnalyzeOptions(k_list=(1, 2, 3, 5), seed=CELL.seed, dataset_id="lognormal_40x30.csv"))
    bad = violations(report)
    if bad:
        raise SystemExit(f"refusing to write golden report with violations: {bad}")
    with open(os.path.join(args.out, "lognormal_40x30.report.json"), "w", encoding="utf-8") as fh:
        fh.write(to_json(report))
    print("wrote", edges)


if __name__ == "__main__":
    main()
