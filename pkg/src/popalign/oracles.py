"""Brute-force reference computations.

These deliberately avoid the fast paths used elsewhere (co-degree formulas,
thin SVD, closed-form LP optima) so they can serve as independent checks in
the test suite and in ``popalign selftest``.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .graph import InteractionMatrix


def adjacency(Y: InteractionMatrix) -> np.ndarray:
    n, m = Y.shape
    A = np.zeros((n + m, n + m))
    A[:n, n:] = Y.entries
    A[n:, :n] = Y.entries.T
    return A


def brute_wedges(Y: InteractionMatrix) -> int:
    """Count open 2-paths x - v - z (x < z) by walking neighbor lists."""
    A = adjacency(Y).astype(int)
    count = 0
    for v in range(A.shape[0]):
        nbrs = np.flatnonzero(A[v])
        count += sum(1 for _ in combinations(nbrs, 2))
    return count


def brute_butterflies(Y: InteractionMatrix) -> int:
    """Count 2x2 all-ones submatrices over every user pair and item pair."""
    y = Y.entries
    n, m = y.shape
    count = 0
    for u1, u2 in combinations(range(n), 2):
        for i1, i2 in combinations(range(m), 2):
            if y[u1, i1] and y[u1, i2] and y[u2, i1] and y[u2, i2]:
                count += 1
    return count


def eig_trace_a4(Y: InteractionMatrix) -> float:
    lam = np.linalg.eigvalsh(adjacency(Y))
    return float(np.sum(lam**4))


def eig_sigma_sq(Y: InteractionMatrix) -> np.ndarray:
    """Squared singular values from eigh of the smaller Gram matrix, descending."""
    y = Y.as_float()
    g = y.T @ y if Y.m <= Y.n else y @ y.T
    return np.clip(np.linalg.eigvalsh(g)[::-1], 0.0, None)


def eig_cos_theta(Y: InteractionMatrix, k: int) -> float:
    """cos(theta_k) from eigenvectors of Y'Y.

    Only meaningful when sigma_k^2 > sigma_{k+1}^2; otherwise the top-k
    subspace is not unique.
    """
    y = Y.as_float()
    w, V = np.linalg.eigh(y.T @ y)
    order = np.argsort(w)[::-1]
    Q = V[:, order[:k]]
    r = y.sum(axis=0)
    return float(np.linalg.norm(Q.T @ r) / np.linalg.norm(r))


def brute_lp(s, mu: float, k: int, tol: float = 1e-12) -> tuple[float, float]:
    """Min and max of sum_{i<k} s_i a_i / mu over every vertex of the LP polytope.

    Vertices are single points with s_j = mu and two-point mixes of indices
    i < j with s_i >= mu >= s_j.
    """
    s = np.asarray(s, dtype=float)
    n = len(s)
    values = []
    scale = max(1.0, s[0])
    for j in range(n):
        if abs(s[j] - mu) <= tol * scale:
            values.append(s[j] / mu if j < k else 0.0)
    for i, j in combinations(range(n), 2):
        hi, lo = (i, j) if s[i] >= s[j] else (j, i)
        if s[hi] - s[lo] <= tol * scale:
            continue
        if not (s[lo] - tol * scale <= mu <= s[hi] + tol * scale):
            continue
        a_hi = (mu - s[lo]) / (s[hi] - s[lo])
        obj = (s[hi] * a_hi if hi < k else 0.0) + (s[lo] * (1 - a_hi) if lo < k else 0.0)
        values.append(obj / mu)
    return min(values), max(values)


def exhaustive_subsets(m: int):
    for size in range(1, m + 1):
        yield from combinations(range(m), size)
