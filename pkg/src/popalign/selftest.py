"""Oracle checks on small built-in instances, run by ``popalign selftest``."""

from __future__ import annotations

import numpy as np

from .graph import InteractionMatrix, butterfly_count, trace_a4, wedge_count
from .lp import lp_lower, lp_upper
from .oracles import brute_butterflies, brute_lp, brute_wedges, eig_trace_a4
from .pi1 import kumar_bounds, pi1_lower_bound
from .pik import subset_context, tau_bounds_kyfan, tau_lower_rowsum, true_tau
from .report import AnalyzeOptions, analyze, violations
from .spectral import svd

K22 = InteractionMatrix(np.ones((2, 2), dtype=np.uint8))
K23 = InteractionMatrix(np.ones((2, 3), dtype=np.uint8))
PATH = InteractionMatrix.from_dense([[1, 1], [0, 1]])


def random_matrices(count: int, seed: int, max_dim: int = 10):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n, m = rng.integers(2, max_dim + 1, size=2)
        y = (rng.random((n, m)) < rng.uniform(0.05, 0.9)).astype(np.uint8)
        if y.any():
            out.append(InteractionMatrix(y))
    return out


def check_motifs() -> bool:
    for Y in [K22, K23, PATH] + random_matrices(20, 1):
        if wedge_count(Y) != brute_wedges(Y) or butterfly_count(Y) != brute_butterflies(Y):
            return False
    return True


def check_trace() -> bool:
    if trace_a4(K22) != 32 or trace_a4(K23) != 72:
        return False
    return all(
        abs(trace_a4(Y) - eig_trace_a4(Y)) <= 1e-6 * max(1, trace_a4(Y))
        for Y in random_matrices(20, 2)
    )


def check_kumar() -> bool:
    for Y, s1 in ((K22, 4.0), (K23, 6.0)):
        kb = kumar_bounds(Y)
        if abs(kb.lower - s1) > 1e-8 or abs(kb.upper - s1) > 1e-8:
            return False
    return True


def check_pi1_tight() -> bool:
    n, m = 3, 4
    return abs(pi1_lower_bound(n * m, n * m, m * n * n, n).value - 1.0) <= 1e-12


def check_lp() -> bool:
    rng = np.random.default_rng(3)
    for _ in range(30):
        length = int(rng.integers(2, 10))
        s = np.sort(rng.random(length) * 10)[::-1]
        mu = float(rng.uniform(s[-1], s[0]))
        if mu <= 0:
            continue
        for k in range(1, length):
            lo, hi = brute_lp(s, mu, k)
            if abs(lp_lower(s, mu, k) - lo) > 1e-9 or abs(lp_upper(s, mu, k) - hi) > 1e-9:
                return False
    return True


def check_tau_brackets() -> bool:
    rng = np.random.default_rng(4)
    for Y in random_matrices(20, 5):
        D = svd(Y)
        for k in range(1, min(3, D.effective_rank) + 1):
            S = sorted(rng.choice(Y.m, size=int(rng.integers(1, Y.m + 1)), replace=False))
            ctx = subset_context(Y, D, S, k)
            tau = true_tau(D, S, k)
            lo, hi = tau_bounds_kyfan(ctx)
            if tau_lower_rowsum(ctx) > tau + 1e-9 or lo > tau + 1e-9 or hi < tau - 1e-9:
                return False
    return True


def check_report_brackets() -> bool:
    return all(not violations(analyze(Y, AnalyzeOptions())) for Y in random_matrices(20, 6))


CHECKS = [
    ("motif counts match brute force", check_motifs),
    ("tr(A^4) exact anchors and eigenvalue oracle", check_trace),
    ("Kumar bounds tight on K22 and K23", check_kumar),
    ("Pi1 bound tight on all-ones", check_pi1_tight),
    ("LP closed form matches vertex enumeration", check_lp),
    ("tau brackets contain true tau", check_tau_brackets),
    ("report brackets hold on random graphs", check_report_brackets),
]


def run(echo=print) -> bool:
    ok = True
    for name, fn in CHECKS:
        passed = fn()
        ok &= passed
        echo(f"{'PASS' if passed else 'FAIL'}  {name}")
    return ok
