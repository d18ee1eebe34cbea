"""Closed-form LP bounds on kappa_k = cos^2(theta_k) from the spectrum and mu.

Writing kappa_k = sum_{i<=k} s_i alpha_i / mu with alpha on the simplex and
sum_i s_i alpha_i = mu, the extremes are attained at two-point vertices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, InfeasibleError

FEAS_TOL = 1e-9


def _prepare(s, mu: float, k: int) -> tuple[np.ndarray, float]:
    s = np.asarray(s, dtype=float)
    if s.ndim != 1 or len(s) < 2:
        raise DataError("spectrum must be a 1-D sequence of length >= 2")
    if np.any(np.diff(s) > FEAS_TOL * max(1.0, s[0])):
        raise DataError("spectrum must be nonincreasing")
    if not 1 <= k < len(s):
        raise DataError(f"k={k} must satisfy 1 <= k < {len(s)}")
    tol = FEAS_TOL * max(1.0, s[0])
    if mu < s[-1] - tol or mu > s[0] + tol:
        raise InfeasibleError(f"mu={mu} outside [{s[-1]}, {s[0]}]")
    if mu <= 0:
        raise InfeasibleError("mu must be positive")
    return s, float(min(max(mu, s[-1]), s[0]))


def lp_lower(s, mu: float, k: int) -> float:
    s, mu = _prepare(s, mu, k)
    s1, sk1 = s[0], s[k]
    if mu <= sk1:
        return 0.0
    # mu > s_{k+1} forces s_1 > s_{k+1}, so the denominator is positive.
    return float(min(1.0, max(0.0, s1 / mu * (mu - sk1) / (s1 - sk1))))


def lp_upper(s, mu: float, k: int) -> float:
    s, mu = _prepare(s, mu, k)
    sk, sn = s[k - 1], s[-1]
    if mu >= sk or sk == sn:
        return 1.0
    return float(min(1.0, max(0.0, sk / mu * (mu - sn) / (sk - sn))))


@dataclass(frozen=True)
class LpWitness:
    weights: dict  # 0-based index -> alpha_i, at most two entries
    objective: float  # sum_{i<k} s_i alpha_i
    kappa: float

    def dense(self, length: int) -> np.ndarray:
        out = np.zeros(length)
        for i, w in self.weights.items():
            out[i] = w
        return out


def _two_point(s: np.ndarray, i: int, j: int, mu: float) -> dict:
    if s[i] == s[j]:
        return {i: 1.0}
    wi = (mu - s[j]) / (s[i] - s[j])
    wi = min(1.0, max(0.0, wi))
    out = {i: wi, j: 1.0 - wi}
    return {idx: w for idx, w in out.items() if w > 0}


def _single_point(s: np.ndarray, mu: float, candidates) -> dict | None:
    tol = FEAS_TOL * max(1.0, s[0])
    for j in candidates:
        if abs(s[j] - mu) <= tol:
            return {j: 1.0}
    return None


def lp_witness(s, mu: float, k: int, side: str) -> LpWitness:
    """An optimal vertex of the LP for the requested side (0-based indices)."""
    s, mu = _prepare(s, mu, k)
    n = len(s)
    if side == "lower":
        tail = range(k, n)
        if mu <= s[k]:
            weights = _single_point(s, mu, tail)
            if weights is None:
                # Bracket mu by consecutive tail values s_j >= mu >= s_{j+1}.
                j = max(j for j in tail if s[j] >= mu)
                weights = _two_point(s, j, j + 1, mu)
        else:
            weights = _single_point(s, mu, [0]) or _two_point(s, 0, k, mu)
    elif side == "upper":
        if mu >= s[k - 1]:
            weights = _single_point(s, mu, range(k)) or _two_point_head(s, mu, k)
        else:
            weights = _single_point(s, mu, [k - 1]) or _two_point(s, k - 1, n - 1, mu)
    else:
        raise DataError(f"side must be 'lower' or 'upper', got {side!r}")
    objective = float(sum(s[i] * w for i, w in weights.items() if i < k))
    return LpWitness(weights=weights, objective=objective, kappa=objective / mu)


def _two_point_head(s: np.ndarray, mu: float, k: int) -> dict:
    # mu inside the head range: pick consecutive head values bracketing it.
    j = max(j for j in range(k) if s[j] >= mu)
    if j == k - 1:
        return {j: 1.0}
    return _two_point(s, j, j + 1, mu)


@dataclass(frozen=True)
class LpBoundResult:
    kappa_lower: float
    kappa_upper: float
    regime_lower: str
    regime_upper: str
    witness_lower: LpWitness
    witness_upper: LpWitness
    degenerate: bool  # flat spectrum where a closed-form denominator vanishes


def lp_bounds(s, mu: float, k: int) -> LpBoundResult:
    s, mu = _prepare(s, mu, k)
    lo, hi = lp_lower(s, mu, k), lp_upper(s, mu, k)
    return LpBoundResult(
        kappa_lower=lo,
        kappa_upper=hi,
        regime_lower="gap_active" if mu > s[k] else "vacuous_zero",
        regime_upper="saturated_one" if hi >= 1.0 else "interior",
        witness_lower=lp_witness(s, mu, k, "lower"),
        witness_upper=lp_witness(s, mu, k, "upper"),
        degenerate=bool(s[0] == s[k] or s[k - 1] == s[-1]),
    )


def padded_spectrum(sigma_sq, length: int) -> np.ndarray:
    out = np.zeros(length)
    vals = np.asarray(sigma_sq, dtype=float)[:length]
    out[: len(vals)] = vals
    return out
