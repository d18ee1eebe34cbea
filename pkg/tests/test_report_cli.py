import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from conftest import PATH, random_binary
from popalign.cli import main
from popalign.errors import DataError
from popalign.graph import InteractionMatrix
from popalign.io import read_matrix
from popalign.report import (
    AGGREGATE_COLUMNS,
    AnalyzeOptions,
    SweepCell,
    analyze,
    build_grid,
    emit_plot_data,
    read_csv,
    sweep,
    to_json,
    violations,
)

DATA = os.path.join(os.path.dirname(__file__), "data")
GOLDEN_EDGES = os.path.join(DATA, "lognormal_40x30.csv")
GOLDEN_REPORT = os.path.join(DATA, "lognormal_40x30.report.json")


def _close(a, b, path="$"):
    if isinstance(a, dict):
        assert isinstance(b, dict) and a.keys() == b.keys(), path
        for key in a:
            _close(a[key], b[key], f"{path}.{key}")
    elif isinstance(a, list):
        assert isinstance(b, list) and len(a) == len(b), path
        for i, (x, y) in enumerate(zip(a, b)):
            _close(x, y, f"{path}[{i}]")
    elif isinstance(a, float) or isinstance(b, float):
        assert math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-9), path
    else:
        assert a == b, path


def test_all_ones_report():
    rep = analyze(InteractionMatrix(np.ones((3, 4), dtype=np.uint8)), AnalyzeOptions(k_list=(1,)))
    rec = rep["per_k"][0]
    assert rec["cos_theta_exact"] == 1.0
    assert rec["pi1"] == pytest.approx(1.0, abs=1e-12)
    assert rec["lp_lower"] == pytest.approx(1.0, abs=1e-12)
    # K_{3,4}: p = 3 and the squared spectrum (12, 0, 0) makes only the upper side tight
    assert rep["kumar"]["upper"] == pytest.approx(12.0, abs=1e-8)
    assert rep["kumar"]["lower"] == pytest.approx(8.0, abs=1e-8)
    assert not violations(rep)


def test_full_rank_record():
    rep = analyze(PATH, AnalyzeOptions(k_list=(1, 2)))
    assert rep["per_k"][1]["cos_theta_exact"] == pytest.approx(1.0, abs=1e-12)


def test_k_beyond_rank_is_trimmed():
    rep = analyze(InteractionMatrix(np.ones((3, 3), dtype=np.uint8)), AnalyzeOptions(k_list=(1, 2)))
    assert [r["k"] for r in rep["per_k"]] == [1] and "k_trimmed:2" in rep["flags"]


def test_explicit_and_exhaustive_subsets(rng):
    Y = random_binary(rng, (4, 8), (3, 6), (0.3, 0.8))
    rep = analyze(Y, AnalyzeOptions(k_list=(1,), subset="explicit", explicit_items=(Y.item_ids[0],)))
    assert rep["per_k"][0]["S_used"] == [Y.item_ids[0]]
    rep = analyze(Y, AnalyzeOptions(k_list=(1,), subset="exhaustive"))
    assert rep["per_k"][0]["S_used"] == "exhaustive" and not violations(rep)
    with pytest.raises(DataError):
        analyze(Y, AnalyzeOptions(subset="explicit", explicit_items=("nope",)))


def test_report_bracket_on_random_graphs(random_suite):
    for Y in random_suite[:60]:
        assert not violations(analyze(Y, AnalyzeOptions()))


def test_golden_report():
    opts = AnalyzeOptions(k_list=(1, 2, 3, 5), seed=17, dataset_id="lognormal_40x30.csv")
    rep = json.loads(to_json(analyze(read_matrix(GOLDEN_EDGES, "csv"), opts)))
    with open(GOLDEN_REPORT, encoding="utf-8") as fh:
        golden = json.load(fh)
    golden["provenance"]["tool_version"] = rep["provenance"]["tool_version"]
    _close(rep, golden)
    assert not violations(rep)


def test_analyze_byte_identical(tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        assert main(["analyze", "--input", GOLDEN_EDGES, "--k", "1,2,3", "--seed", "5", "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_sweep_deterministic_across_workers():
    cells = build_grid(["power_law:1.5", "log_normal:2.0,1.0"], [(30, 40), (20, 25)], seed=3)
    r1, rows1 = sweep(cells, (1, 2), workers=1)
    r4, rows4 = sweep(cells, (1, 2), workers=4)
    assert json.dumps(r1, sort_keys=True) == json.dumps(r4, sort_keys=True)
    assert rows1 == rows4


def test_sweep_cell_isolation():
    cells = [SweepCell("power_law:1.5", 20, 30, 1),
             SweepCell("power_law:1.5", 5, 5, 2, density_cap=1e-300),
             SweepCell("log_normal:2.0,1.0", 20, 30, 3)]
    results, rows = sweep(cells, (1,))
    assert results[1]["report"] is None and "no edges" in results[1]["error"]
    assert results[0]["report"] and results[2]["report"]
    assert {r["distribution"] for r in rows} == {"power_law", "log_normal"}


def test_sweep_spec_grid():
    cells = build_grid(["power_law:1.5", "log_normal:2.0,1.0"], [(200, 500)], seed=0)
    results, rows = sweep(cells, (1, 5), workers=2)
    assert all(res["report"] and not violations(res["report"]) for res in results)
    assert len(rows) == 4


def test_empty_sweep(tmp_path):
    assert sweep([], (1,)) == ([], [])
    assert main(["sweep", "--out", str(tmp_path / "s")]) == 0
    header, rows = read_csv(tmp_path / "s" / "aggregate.csv")
    assert tuple(header) == AGGREGATE_COLUMNS and rows == []


def test_plot_data_round_trip(tmp_path):
    rep = analyze(PATH, AnalyzeOptions(k_list=(1, 2)))
    paths = emit_plot_data(tmp_path, report=rep, rank_freq={"items": [(1, 2), (2, 1)]})
    header, rows = read_csv(tmp_path / "items_rank_frequency.csv")
    assert header == ["rank", "frequency"] and rows == [["1", "2"], ["2", "1"]]
    header, rows = read_csv(tmp_path / "per_k.csv")
    assert float(rows[-1][1]) == pytest.approx(1.0)
    for rec, row in zip(rep["per_k"], rows):
        assert float(row[1]) == pytest.approx(rec["cos_theta_exact"], rel=1e-11)
    assert len(paths) == 3


def _cli(*args, env=None):
    return subprocess.run([sys.executable, "-m", "popalign", *args], capture_output=True, text=True,
                          env={**os.environ, **(env or {})})


def test_cli_exit_codes(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("u1,i1\nu1\n")
    assert _cli("analyze").returncode == 1
    assert _cli("analyze", "--input", GOLDEN_EDGES, "--k", "0").returncode == 1
    res = _cli("analyze", "--input", str(bad))
    assert res.returncode == 2 and "line 2" in res.stderr
    assert _cli("analyze", "--input", str(tmp_path / "missing.csv")).returncode == 2
    res = _cli("analyze", "--input", GOLDEN_EDGES, "--k", "1")
    assert res.returncode == 0 and json.loads(res.stdout)["per_k"][0]["k"] == 1


def test_cli_invariant_exit(monkeypatch, tmp_path):
    import popalign.cli as cli

    def broken(Y, opts):
        rep = analyze(Y, opts)
        rep["per_k"][0]["flags"].append("violation:a1")
        return rep

    monkeypatch.setattr(cli, "analyze", broken)
    assert cli.main(["analyze", "--input", GOLDEN_EDGES, "--out", str(tmp_path / "r.json")]) == 3


def test_cli_generate_seed_env(tmp_path):
    a = _cli("generate", "--law", "power_law:1.5", "--n", "10", "--m", "15", env={"POPALIGN_SEED": "4"})
    b = _cli("generate", "--law", "power_law:1.5", "--n", "10", "--m", "15", "--seed", "4")
    assert a.returncode == 0 and a.stdout == b.stdout
    mm = tmp_path / "g.mtx"
    assert _cli("generate", "--law", "exponential:1.0", "--n", "6", "--m", "6", "--format", "mm",
                "--out", str(mm)).returncode == 0
    assert _cli("analyze", "--input", str(mm), "--format", "mm", "--k", "1").returncode == 0


def test_cli_selftest():
    res = _cli("selftest")
    assert res.returncode == 0
    assert res.stdout.count("PASS") == 7 and "FAIL" not in res.stdout
