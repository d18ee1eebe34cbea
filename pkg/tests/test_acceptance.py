"""Exit criteria, each at its stated tolerance. One PASS/FAIL line per criterion."""

import json
import time

import numpy as np
import pytest

from conftest import K22, K23, random_binary
from popalign.graph import InteractionMatrix, butterfly_count, degree_summary, trace_a4, wedge_count
from popalign.lp import lp_lower, lp_upper, lp_witness, padded_spectrum
from popalign.oracles import brute_butterflies, brute_lp, brute_wedges
from popalign.pi1 import kumar_bounds, pi1_lower_bound, pi1_lower_bound_linearized
from popalign.pik import (
    pik_bounds,
    principal_block,
    subset_context,
    tau_bounds_kyfan,
    tau_lower_rowsum,
    top_k_items,
    true_tau,
)
from popalign.report import AnalyzeOptions, analyze, build_grid, sweep, to_json
from popalign.spectral import alignment_profile, svd
from popalign.synth import DistributionSpec, curvature_statistic, matched_pair, sample_item_weights

pytestmark = pytest.mark.acceptance
RESULTS = []


def record(number, name, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {name}" + (f" ({detail})" if detail else "")
    RESULTS.append(line)
    print(line)
    return ok


def suite_200():
    rng = np.random.default_rng(2024)
    return [random_binary(rng, (2, 25), (2, 25), (0.05, 0.9)) for _ in range(200)], rng


def subsets_for(Y, k, rng):
    return [top_k_items(Y.item_degrees(), k), sorted(rng.choice(Y.m, size=k, replace=False).tolist())]


def test_c1_bracket_suite():
    start = time.perf_counter()
    mats, rng = suite_200()
    failures, checked = [], 0
    for idx, Y in enumerate(mats):
        D = svd(Y)
        prof = alignment_profile(Y, D)
        ds = degree_summary(Y)
        s = padded_spectrum(D.sigma_sq, Y.n)
        for k in (1, 2, 3):
            if k > D.effective_rank:
                continue
            cos = prof.cos(k)
            lowers, uppers = {}, {}
            if k == 1:
                lowers["pi1"] = pi1_lower_bound(D.sigma_sq[0], ds.vol1_items, ds.vol2_items, ds.r_max).value
            if k < Y.n:
                lowers["lp"] = np.sqrt(lp_lower(s, prof.mu_ratio, k))
                uppers["lp"] = np.sqrt(lp_upper(s, prof.mu_ratio, k))
            for S in subsets_for(Y, k, rng):
                b = pik_bounds(subset_context(Y, D, S, k), D)
                lowers.update({f"{key}{S}": v for key, v in b.lowers().items()})
                uppers.update({f"{key}{S}": v for key, v in b.uppers().items()})
            checked += len(lowers) + len(uppers)
            failures += [(idx, k, key) for key, v in lowers.items() if v > cos + 1e-9]
            failures += [(idx, k, key) for key, v in uppers.items() if v < cos - 1e-9]
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 60
    record(1, "bracket suite", ok, f"{checked} bound evaluations, {len(failures)} violations, {elapsed:.1f}s")
    assert not failures, failures[:5]
    assert elapsed < 60


def test_c2_tight_anchors():
    ok = True
    for n, m in [(1, 1), (2, 3), (3, 4), (6, 2), (5, 5)]:
        Y = InteractionMatrix(np.ones((n, m), dtype=np.uint8))
        D = svd(Y)
        ds = degree_summary(Y)
        ok &= abs(pi1_lower_bound(D.sigma_sq[0], ds.vol1_items, ds.vol2_items, ds.r_max).value - 1) <= 1e-12
        ok &= abs(alignment_profile(Y, D).cos(1) - 1) <= 1e-12
    for Y, sigma in ((K22, 4.0), (K23, 6.0)):
        kb = kumar_bounds(Y)
        ok &= abs(kb.lower - sigma) <= 1e-8 and abs(kb.upper - sigma) <= 1e-8
        ok &= abs(svd(Y).sigma_sq[0] - sigma) <= 1e-8
    t22, t23 = trace_a4(K22), trace_a4(K23)
    ok &= type(t22) is int and t22 == 32 and t23 == 72
    record(2, "tight anchors", ok, f"tr(A^4) = {t22}, {t23}")
    assert ok


def test_c3_oracle_equivalences():
    graphs = 0
    ok_counts = ok_trace = True
    for seed in range(50):
        rng = np.random.default_rng(seed)
        for _ in range(4):
            n, m = rng.integers(1, 11, size=2)
            Y = InteractionMatrix((rng.random((n, m)) < rng.uniform(0.05, 0.95)).astype(np.uint8))
            graphs += 1
            ok_counts &= wedge_count(Y) == brute_wedges(Y) and butterfly_count(Y) == brute_butterflies(Y)
            t = trace_a4(Y)
            ok_trace &= abs(t - 2 * np.sum(svd(Y).sigma_sq ** 2)) <= 1e-6 * max(1, t)
    ok_lp = ok_wit = True
    rng = np.random.default_rng(99)
    for _ in range(100):
        length = int(rng.integers(2, 11))
        s = np.sort(rng.random(length) * 10)[::-1]
        if rng.random() < 0.3:
            s[rng.integers(1, length):] = 0.0
        for mu in rng.uniform(max(s[-1], 1e-3), s[0], size=3):
            for k in range(1, length):
                lo, hi = brute_lp(s, mu, k)
                ok_lp &= abs(lp_lower(s, mu, k) - lo) <= 1e-9 and abs(lp_upper(s, mu, k) - hi) <= 1e-9
                for side, target in (("lower", lo), ("upper", hi)):
                    w = lp_witness(s, mu, k, side)
                    a = w.dense(length)
                    ok_wit &= bool(np.all(a >= 0)) and abs(a.sum() - 1) <= 1e-9
                    ok_wit &= abs(a @ s - mu) <= 1e-9 and abs(w.kappa - target) <= 1e-9
    ok = ok_counts and ok_trace and ok_lp and ok_wit
    record(3, "oracle equivalences", ok,
           f"{graphs} graphs: counts={ok_counts}, trace={ok_trace}; 100 spectra: lp={ok_lp}, witnesses={ok_wit}")
    assert ok


def test_c4_ordering_properties():
    mats, rng = suite_200()
    bad = []
    for idx, Y in enumerate(mats):
        D = svd(Y)
        prof = alignment_profile(Y, D)
        ds = degree_summary(Y)
        s1 = D.sigma_sq[0]
        args = (ds.vol1_items, ds.vol2_items, ds.r_max)
        exact = pi1_lower_bound(s1, *args).value
        second = pi1_lower_bound_linearized(s1, *args, order="2nd").value
        first = pi1_lower_bound_linearized(s1, *args, order="1st").value
        if not exact >= second >= first:
            bad.append((idx, "pi1 chain"))
        if np.any(np.diff(prof.cos_theta) < -1e-12):
            bad.append((idx, "cos monotone"))
        s = padded_spectrum(D.sigma_sq, Y.n)
        lps = [lp_lower(s, prof.mu_ratio, k) for k in range(1, Y.n)]
        if any(b < a - 1e-12 for a, b in zip(lps, lps[1:])):
            bad.append((idx, "lp monotone"))
        for k in range(1, min(3, D.effective_rank) + 1):
            for S in subsets_for(Y, k, rng):
                b = pik_bounds(subset_context(Y, D, S, k), D)
                if b.b1 < b.a1 - 1e-9 or b.b3_from_b1 > b.b1 + 1e-9:
                    bad.append((idx, k, "B1/A1/B3"))
                if b.b2 < b.a2 - 1e-9 or b.b3_from_b2 > b.b2 + 1e-9:
                    bad.append((idx, k, "B2/A2/B3"))
    record(4, "ordering properties", not bad, f"{len(bad)} violations")
    assert not bad, bad[:5]


def test_c5_spectral_laws():
    mats, rng = suite_200()
    bad = []
    for idx, Y in enumerate(mats):
        D = svd(Y)
        if D.sigma_sq[0] < degree_summary(Y).r_max - 1e-9:
            bad.append((idx, "sigma1 >= r_max"))
        for k in range(1, min(3, D.effective_rank) + 1):
            for S in subsets_for(Y, k, rng) + [sorted(rng.choice(Y.m, size=min(Y.m, k + 2), replace=False).tolist())]:
                ctx = subset_context(Y, D, S, k)
                lam = ctx.bs_user_eigs
                for i in range(1, Y.n + 1):
                    if not ctx.sigma_sq_at(i) + 1e-8 >= lam[i - 1] >= ctx.sigma_sq_at(i + len(S)) - 1e-8:
                        bad.append((idx, k, "interlacing", i))
                ev = np.linalg.eigvalsh(principal_block(D, S, k))
                tau = true_tau(D, S, k)
                if ev.min() < -1e-8 or ev.max() > 1 + 1e-8 or np.sum(ev > 1e-8) > k:
                    bad.append((idx, k, "M_S spectrum"))
                if abs(ev.sum() - tau) > 1e-8:
                    bad.append((idx, k, "trace"))
                lo, hi = tau_bounds_kyfan(ctx)
                if tau_lower_rowsum(ctx) > tau + 1e-9 or lo > tau + 1e-9 or hi < tau - 1e-9:
                    bad.append((idx, k, "tau brackets"))
    record(5, "spectral laws", not bad, f"{len(bad)} violations")
    assert not bad, bad[:5]


def test_c6_distribution_shape():
    ln = sample_item_weights(DistributionSpec.parse("log_normal:2.0,1.0", 10_000, seed=0))
    pl = sample_item_weights(DistributionSpec.parse("power_law:1.5", 10_000, seed=0))
    c_ln, c_pl = curvature_statistic(ln), curvature_statistic(pl)
    wins = 0
    for seed in range(50):
        laws = (DistributionSpec.parse("power_law:1.5", 500, seed=2 * seed),
                DistributionSpec.parse("log_normal:2.0,1.0", 500, seed=2 * seed + 1))
        Y_pl, Y_ln = matched_pair(laws, 200, seed=1000 + seed)
        cos_pl = alignment_profile(Y_pl, svd(Y_pl)).cos(1)
        cos_ln = alignment_profile(Y_ln, svd(Y_ln)).cos(1)
        wins += cos_ln < cos_pl
    ok = c_ln > c_pl and wins >= 40
    record(6, "distribution shape", ok,
           f"curvature log-normal {c_ln:.3f} vs power law {c_pl:.3f}; log-normal less aligned in {wins}/50 pairs")
    assert c_ln > c_pl
    assert wins >= 40


def test_c7_determinism():
    rng = np.random.default_rng(5)
    Y = random_binary(rng, (10, 25), (10, 25), (0.1, 0.6))
    opts = AnalyzeOptions(k_list=(1, 2, 3), seed=5)
    same_analyze = to_json(analyze(Y, opts)) == to_json(analyze(Y, opts))
    cells = build_grid(["power_law:1.5", "log_normal:2.0,1.0", "exponential:0.5"], [(40, 60), (25, 30)], seed=8)
    dumps = {w: json.dumps(sweep(cells, (1, 2), workers=w), sort_keys=True, indent=2) for w in (1, 2, 4)}
    same_sweep = len(set(dumps.values())) == 1
    ok = same_analyze and same_sweep
    record(7, "determinism", ok, f"analyze={same_analyze}, sweep across 1/2/4 workers={same_sweep}")
    assert ok
