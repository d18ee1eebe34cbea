"""End-to-end analysis: every bound for every requested k, with the exact value it brackets."""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .errors import DataError, PopAlignError
from .graph import InteractionMatrix, degree_summary, motif_counts
from .lp import lp_bounds, padded_spectrum
from .oracles import exhaustive_subsets
from .pi1 import kumar_bounds, pi1_lower_bound, pi1_lower_bound_linearized
from .pik import pik_bounds, subset_context, top_k_items
from .spectral import alignment_profile, svd
from .synth import DistributionSpec, RealizationSpec, realize_bipartite, sample_item_weights

log = logging.getLogger(__name__)

SIG_DIGITS = 12
EXHAUSTIVE_MAX_M = 15
LOWER_KEYS = ("pi1", "pi1_linearized_2nd", "pi1_linearized_1st", "a1", "a2", "b1", "b2",
              "b3_from_b1", "b3_from_b2", "lp_lower")
UPPER_KEYS = ("c1", "c2", "c3", "lp_upper")


@dataclass(frozen=True)
class AnalyzeOptions:
    k_list: tuple[int, ...] = (1, 2, 3)
    subset: str = "top"  # top | explicit | exhaustive
    explicit_items: tuple[str, ...] = ()
    rank_tol: float | None = None
    drop_zero_items: bool = False
    bracket_tol: float = 1e-9
    max_spectrum: int = 50
    seed: int | None = None
    dataset_id: str = ""

    def __post_init__(self):
        if self.subset not in ("top", "explicit", "exhaustive"):
            raise DataError(f"unknown subset strategy {self.subset!r}")
        if self.subset == "explicit" and not self.explicit_items:
            raise DataError("explicit subset strategy needs item ids")
        if any(k < 1 for k in self.k_list):
            raise DataError("k values must be >= 1")


def input_hash(Y: InteractionMatrix) -> str:
    h = hashlib.sha256()
    h.update(f"{Y.n}x{Y.m}".encode())
    h.update(np.packbits(Y.entries, axis=None).tobytes())
    return h.hexdigest()


def _fmt(x: float) -> float:
    return float(f"{x:.{SIG_DIGITS}g}")


def canonical(obj):
    """Recursively round floats to 12 significant digits and convert numpy scalars."""
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x} in report")
        return _fmt(x)
    return obj


def to_json(report: dict) -> str:
    return json.dumps(canonical(report), sort_keys=True, indent=2) + "\n"


def _resolve_explicit(Y: InteractionMatrix, ids: Sequence[str]) -> list[int]:
    lookup = {item: i for i, item in enumerate(Y.item_ids)}
    missing = [x for x in ids if x not in lookup]
    if missing:
        raise DataError(f"unknown item ids {missing}")
    return sorted(lookup[x] for x in ids)


def _pi1_block(sigma1_sq, ds, kumar) -> dict:
    exact = pi1_lower_bound(sigma1_sq, ds.vol1_items, ds.vol2_items, ds.r_max)
    out = {"pi1": exact.value, "pi1_raw": exact.raw}
    if kumar is not None and kumar.lower > 0:
        for order in ("2nd", "1st"):
            b = pi1_lower_bound_linearized(kumar.lower, ds.vol1_items, ds.vol2_items, ds.r_max, order)
            out[f"pi1_linearized_{order}"] = b.value
            out[f"pi1_linearized_{order}_raw"] = b.raw
        out["pi1_L"] = kumar.lower
    return out


def _subset_bounds(Y, D, S, k) -> dict:
    ctx = subset_context(Y, D, S, k)
    b = pik_bounds(ctx, D)
    return {
        "a1": b.a1, "a2": b.a2, "b1": b.b1, "b2": b.b2,
        "b3_from_b1": b.b3_from_b1, "b3_from_b2": b.b3_from_b2,
        "c1": b.c1, "c2": b.c2, "c3": b.c3,
        "tau": {
            "true": b.witnesses["tau_S"],
            "rowsum_lower": b.tau_lower_rowsum,
            "kyfan_lower": b.tau_lower_kyfan,
            "kyfan_upper": b.tau_upper_kyfan,
        },
        "c2_vacuous": b.witnesses["c2_vacuous"],
    }


def _exhaustive_bounds(Y, D, k) -> dict:
    best: dict = {}
    best_s: dict = {}
    for S in exhaustive_subsets(Y.m):
        vals = _subset_bounds(Y, D, S, k)
        for key in ("a1", "a2", "b1", "b2", "b3_from_b1", "b3_from_b2"):
            v = vals[key]
            if v is not None and (best.get(key) is None or v > best[key]):
                best[key], best_s[key] = v, S
        for key in ("c1", "c2", "c3"):
            v = vals[key]
            if best.get(key) is None or v < best[key]:
                best[key], best_s[key] = v, S
    for key in ("a1", "a2", "b1", "b2", "b3_from_b1", "b3_from_b2"):
        best.setdefault(key, None)
    best["best_subsets"] = {key: [Y.item_ids[i] for i in S] for key, S in best_s.items()}
    return best


def _lp_block(D, prof, n: int, k: int) -> tuple[dict, list[str]]:
    if k >= n:
        return {"lp_lower": 1.0, "lp_upper": 1.0, "lp_kappa_lower": 1.0, "lp_kappa_upper": 1.0,
                "lp_regime_lower": "full_dimension", "lp_regime_upper": "full_dimension"}, [
            "lp_full_dimension"]
    s = padded_spectrum(D.sigma_sq, n)
    res = lp_bounds(s, prof.mu_ratio, k)
    flags = ["lp_degenerate_spectrum"] if res.degenerate else []
    return {
        "lp_lower": math.sqrt(res.kappa_lower),
        "lp_upper": math.sqrt(res.kappa_upper),
        "lp_kappa_lower": res.kappa_lower,
        "lp_kappa_upper": res.kappa_upper,
        "lp_regime_lower": res.regime_lower,
        "lp_regime_upper": res.regime_upper,
        "lp_witness_lower": {str(i): w for i, w in sorted(res.witness_lower.weights.items())},
        "lp_witness_upper": {str(i): w for i, w in sorted(res.witness_upper.weights.items())},
    }, flags


def check_bracket(record: dict, tol: float) -> list[str]:
    """Names of bounds that fail to bracket cos_theta_exact."""
    cos = record["cos_theta_exact"]
    bad = []
    for key in LOWER_KEYS:
        v = record.get(key)
        if v is not None and v > cos + tol:
            bad.append(key)
    for key in UPPER_KEYS:
        v = record.get(key)
        if v is not None and v < cos - tol:
            bad.append(key)
    return bad


def analyze(Y: InteractionMatrix, options: AnalyzeOptions = AnalyzeOptions()) -> dict:
    flags: list[str] = []
    dropped = 0
    if options.drop_zero_items:
        before = Y.m
        Y = Y.drop_zero_items()
        dropped = before - Y.m
    if Y.e == 0:
        raise DataError("matrix has no edges")
    ds = degree_summary(Y)
    D = svd(Y, options.rank_tol)
    prof = alignment_profile(Y, D)
    motifs = motif_counts(Y)
    mult = D.sigma1_multiplicity()
    if mult > 1:
        flags.append(f"sigma1_multiplicity:{mult}")

    kumar = None
    try:
        kumar = kumar_bounds(Y)
    except DataError as exc:
        flags.append("kumar_unavailable")
        log.info("kumar bounds skipped: %s", exc)
    sigma1_sq = float(D.sigma_sq[0])
    if kumar is not None:
        if not kumar.exact_identity:
            flags.append("kumar_identity_approximate")
        slack = 1e-8 * max(1.0, sigma1_sq)
        if not kumar.lower - slack <= sigma1_sq <= kumar.upper + slack:
            flags.append("violation:kumar")

    explicit = _resolve_explicit(Y, options.explicit_items) if options.subset == "explicit" else None
    if options.subset == "exhaustive" and Y.m > EXHAUSTIVE_MAX_M:
        raise DataError(f"exhaustive subset search needs m <= {EXHAUSTIVE_MAX_M}, got {Y.m}")

    per_k = []
    for k in sorted(set(options.k_list)):
        if k > D.effective_rank:
            flags.append(f"k_trimmed:{k}")
            continue
        rec: dict = {"k": k, "cos_theta_exact": prof.cos(k), "kappa_exact": float(prof.kappa[k - 1])}
        rflags: list[str] = []
        if options.subset == "exhaustive":
            rec["S_used"] = "exhaustive"
            rec.update(_exhaustive_bounds(Y, D, k))
        else:
            S = explicit if explicit is not None else top_k_items(ds.r, k)
            rec["S_used"] = [Y.item_ids[i] for i in S]
            vals = _subset_bounds(Y, D, S, k)
            if vals.pop("c2_vacuous"):
                rflags.append("c2_vacuous")
            rec.update(vals)
        if k == 1:
            rec.update(_pi1_block(sigma1_sq, ds, kumar))
        lp, lp_flags = _lp_block(D, prof, Y.n, k)
        rec.update(lp)
        rflags += lp_flags
        rec["kumar_lower"] = kumar.lower if kumar else None
        rec["kumar_upper"] = kumar.upper if kumar else None
        lowers = [rec[key] for key in LOWER_KEYS if rec.get(key) is not None]
        uppers = [rec[key] for key in UPPER_KEYS if rec.get(key) is not None]
        rec["best_lower"] = max(lowers)
        rec["best_upper"] = min([1.0] + uppers)
        rflags += [f"violation:{key}" for key in check_bracket(rec, options.bracket_tol)]
        rec["flags"] = rflags
        per_k.append(rec)

    report = {
        "dataset_id": options.dataset_id,
        "n": Y.n,
        "m": Y.m,
        "e": Y.e,
        "degree_stats": {
            "vol1_items": ds.vol1_items,
            "vol2_items": ds.vol2_items,
            "r_max": ds.r_max,
            "d_user_max": max(ds.d_user),
            "d_bar": float(ds.d_bar),
            "d_tilde_items": float(ds.d_tilde_items),
            "mu": prof.mu_ratio,
        },
        "spectrum": [float(x) for x in D.sigma_sq[: options.max_spectrum]],
        "effective_rank": D.effective_rank,
        "motifs": {
            "wedges": motifs.wedges,
            "butterflies": motifs.butterflies,
            "trace_a4": motifs.trace_a4,
        },
        "kumar": None if kumar is None else {
            "lower": kumar.lower, "upper": kumar.upper, "mean_deg": kumar.mean_deg,
            "s": kumar.s, "p": kumar.p, "var_d": kumar.var_d, "wedge_term": kumar.wedge_term,
            "butterfly_term": kumar.butterfly_term, "exact_identity": kumar.exact_identity,
        },
        "per_k": per_k,
        "flags": flags,
        "ingestion": {
            "duplicates": Y.duplicates,
            "binarized": Y.binarized,
            "dropped_zero_items": dropped,
        },
        "provenance": {
            "input_hash": input_hash(Y),
            "seed": options.seed,
            "tool_version": __version__,
            "subset_strategy": options.subset,
            "tolerances": {"bracket": options.bracket_tol, "rank_tol": D.rank_tol},
        },
    }
    return report


def violations(report: dict) -> list[str]:
    found = [flag for flag in report["flags"] if flag.startswith("violation:")]
    return found + [
        f"k={rec['k']}:{flag}"
        for rec in report["per_k"]
        for flag in rec["flags"]
        if flag.startswith("violation:")
    ]


@dataclass(frozen=True)
class SweepCell:
    law: str
    n: int
    m: int
    seed: int
    density_cap: float = 1.0

    def cell_id(self) -> str:
        return f"{self.law}|n={self.n}|m={self.m}|seed={self.seed}"


def build_grid(laws: Iterable[str], sizes: Iterable[tuple[int, int]], seed: int) -> list[SweepCell]:
    """Cartesian product of laws and (n, m) sizes with a fixed seed per cell."""
    cells = []
    for law in laws:
        for n, m in sizes:
            cells.append(SweepCell(law, n, m, seed + len(cells)))
    return cells


def generate(cell: SweepCell) -> InteractionMatrix:
    spec = DistributionSpec.parse(cell.law, cell.m, seed=cell.seed)
    weights = sample_item_weights(spec)
    return realize_bipartite(
        weights, RealizationSpec(cell.n, seed=cell.seed, target_density_cap=cell.density_cap)
    )


def _run_cell(cell: SweepCell, k_list: tuple[int, ...]) -> dict:
    try:
        Y = generate(cell)
        report = analyze(Y, AnalyzeOptions(k_list=k_list, seed=cell.seed, dataset_id=cell.cell_id()))
        return {"cell": cell.cell_id(), "law": cell.law, "report": report, "error": None}
    except PopAlignError as exc:
        return {"cell": cell.cell_id(), "law": cell.law, "report": None, "error": str(exc)}


AGGREGATE_COLUMNS = ("distribution", "params", "n", "m", "k", "cos_theta", "best_lower",
                     "best_upper", "lp_lower", "lp_upper")


def sweep(cells: Sequence[SweepCell], k_list: Sequence[int], workers: int = 1) -> tuple[list[dict], list[dict]]:
    """Analyze every cell; results come back in cell order whatever the worker count."""
    k_list = tuple(k_list)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda c: _run_cell(c, k_list), cells))
    else:
        results = [_run_cell(c, k_list) for c in cells]
    rows = []
    for res in results:
        if res["report"] is None:
            continue
        kind, _, params = res["law"].partition(":")
        rep = res["report"]
        for rec in rep["per_k"]:
            rows.append({
                "distribution": kind, "params": params, "n": rep["n"], "m": rep["m"],
                "k": rec["k"], "cos_theta": rec["cos_theta_exact"],
                "best_lower": rec["best_lower"], "best_upper": rec["best_upper"],
                "lp_lower": rec["lp_lower"], "lp_upper": rec["lp_upper"],
            })
    return results, rows


def _csv_value(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.{SIG_DIGITS}g}"
    return v


def write_csv(path, header: Sequence[str], rows: Iterable) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            if isinstance(row, dict):
                row = [row[h] for h in header]
            w.writerow([_csv_value(v) for v in row])


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


PER_K_COLUMNS = ("k", "cos_theta", "best_lower", "best_upper", "a1", "b1", "c1", "c2",
                 "lp_lower", "lp_upper")


def per_k_rows(report: dict) -> list[list]:
    out = []
    for rec in report["per_k"]:
        out.append([rec["k"], rec["cos_theta_exact"], rec["best_lower"], rec["best_upper"],
                    rec["a1"], rec["b1"], rec["c1"], rec["c2"], rec["lp_lower"], rec["lp_upper"]])
    return out


def log_rank_frequency_rows(pairs) -> list[list[float]]:
    return [[math.log(rank), math.log(freq)] for rank, freq in pairs]


def emit_plot_data(target_dir, report: dict | None = None, rank_freq: dict | None = None) -> list[str]:
    """Write per-k bound series and/or rank-frequency series as plain CSV.

    ``rank_freq`` maps a series name to (rank, frequency) pairs; each gets a
    ``<name>_rank_frequency.csv`` and a ``<name>_loglog.csv``.
    """
    os.makedirs(target_dir, exist_ok=True)
    paths = []
    if report is not None:
        path = os.path.join(target_dir, "per_k.csv")
        write_csv(path, PER_K_COLUMNS, per_k_rows(report))
        paths.append(path)
    for name, pairs in (rank_freq or {}).items():
        path = os.path.join(target_dir, f"{name}_rank_frequency.csv")
        write_csv(path, ("rank", "frequency"), pairs)
        paths.append(path)
        path = os.path.join(target_dir, f"{name}_loglog.csv")
        write_csv(path, ("log_rank", "log_frequency"), log_rank_frequency_rows(pairs))
        paths.append(path)
    return paths
