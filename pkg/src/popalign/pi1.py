"""Lower bounds on cos(r, q_1) and Kumar's two-sided estimate of sigma_1^2."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DataError
from .graph import InteractionMatrix, all_degrees, motif_counts

VARIANTS = ("exact", "linearized_2nd", "linearized_1st", "distributional")


@dataclass(frozen=True)
class Pi1Bound:
    value: float
    raw: float
    sigma1_sq: float
    vol1: float
    vol2: float
    r_used: float
    variant: str


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def _check_nonneg(**kwargs):
    for name, val in kwargs.items():
        if val < 0 or math.isnan(val):
            raise DataError(f"{name} must be nonnegative, got {val}")


def pi1_lower_bound(sigma1_sq: float, vol1: float, vol2: float, r_s: float) -> Pi1Bound:
    """(sigma_1^2 / sqrt(vol2)) * sqrt(1 - (vol1 - r_s) / sigma_1^2).

    Valid for any item s with degree r_s; r_s = r_max gives the tightest
    version. A negative radicand yields value 0 and a negative ``raw``
    (magnitude of the shortfall) so the vacuous regime stays visible.
    """
    _check_nonneg(sigma1_sq=sigma1_sq, vol1=vol1, vol2=vol2, r_s=r_s)
    if sigma1_sq == 0 or vol2 == 0:
        raise DataError("sigma1_sq and vol2 must be positive")
    if r_s > vol1:
        raise DataError(f"r_s={r_s} exceeds vol1={vol1}")
    radicand = 1.0 - (vol1 - r_s) / sigma1_sq
    prefactor = sigma1_sq / math.sqrt(vol2)
    raw = math.copysign(prefactor * math.sqrt(abs(radicand)), radicand)
    return Pi1Bound(_clamp01(raw), raw, sigma1_sq, vol1, vol2, r_s, "exact")


def pi1_lower_bound_linearized(
    L: float, vol1: float, vol2: float, r_max: float, order: str = "2nd"
) -> Pi1Bound:
    """Polynomial relaxations of the square root, with a lower proxy L <= sigma_1^2.

    ``order="2nd"`` uses 1 - a/2 - a^2/2 and ``order="1st"`` uses 1 - a, where
    a = (vol1 - r_max) / L.
    """
    if L <= 0:
        raise DataError(f"L must be positive, got {L}")
    _check_nonneg(vol1=vol1, vol2=vol2, r_max=r_max)
    if vol2 == 0:
        raise DataError("vol2 must be positive")
    a = (vol1 - r_max) / L
    if order == "2nd":
        poly, variant = 1.0 - a / 2.0 - a * a / 2.0, "linearized_2nd"
    elif order == "1st":
        poly, variant = 1.0 - a, "linearized_1st"
    else:
        raise DataError(f"order must be '1st' or '2nd', got {order!r}")
    raw = L / math.sqrt(vol2) * poly
    return Pi1Bound(_clamp01(raw), raw, L, vol1, vol2, r_max, variant)


def pi1_lower_bound_distributional(
    vol1_rho: float,
    vol2_rho: float,
    sigma1_sq: float,
    r_max: float,
    vol1: float | None = None,
    vol2: float | None = None,
) -> Pi1Bound:
    """Same formula with volumes of a dominating popularity law rho.

    When the graph's own volumes are supplied, dominance (vol_rho >= vol) is
    enforced; without it the inequality could silently reverse.
    """
    if vol1 is not None and vol1_rho < vol1:
        raise DataError(f"vol1_rho={vol1_rho} does not dominate vol1={vol1}")
    if vol2 is not None and vol2_rho < vol2:
        raise DataError(f"vol2_rho={vol2_rho} does not dominate vol2={vol2}")
    b = pi1_lower_bound(sigma1_sq, vol1_rho, vol2_rho, r_max)
    return Pi1Bound(b.value, b.raw, sigma1_sq, vol1_rho, vol2_rho, r_max, "distributional")


def envelope_volumes(r, law: Callable[[np.ndarray], np.ndarray]) -> tuple[float, float, float]:
    """Volumes of the smallest multiple c*law(rank) that dominates the rank-frequency of r.

    Returns (scale, vol1_rho, vol2_rho). Since c*law(i) >= r_(i) at every rank
    i, both volumes dominate the graph's.
    """
    freq = np.sort(np.asarray(r, dtype=float))[::-1]
    ranks = np.arange(1, len(freq) + 1, dtype=float)
    shape = np.asarray(law(ranks), dtype=float)
    if np.any(shape <= 0):
        raise DataError("law must be positive on every rank")
    scale = float(np.max(freq / shape))
    rho = scale * shape
    return scale, float(rho.sum()), float((rho**2).sum())


@dataclass(frozen=True)
class KumarBound:
    lower: float
    upper: float
    mean_deg: float
    s: float
    p: int
    var_d: float
    wedge_term: float
    butterfly_term: float
    trace_a4: int
    exact_identity: bool  # n + m even, so mean_deg equals the average degree


def kumar_bounds(Y: InteractionMatrix, tol: float = 1e-9) -> KumarBound:
    """m + s/sqrt(p-1) <= sigma_1^2 <= m + s*sqrt(p-1), with m = e/p, p = floor((n+m)/2)."""
    n, m = Y.shape
    if n + m < 4:
        raise DataError(f"Kumar bounds need n + m >= 4, got {n + m}")
    e = Y.e
    if e < 1:
        raise DataError("Kumar bounds need at least one edge")
    p = (n + m) // 2
    motifs = motif_counts(Y)
    M = motifs.trace_a4
    mean_deg = e / p
    s_sq = M / (2 * p) - mean_deg**2
    if s_sq < -tol * max(1.0, mean_deg**2):
        raise DataError(
            f"M/(2p) - mean^2 = {s_sq} < 0 (M={M}, p={p}, e={e}); trace identity broken"
        )
    s = math.sqrt(max(s_sq, 0.0))
    sum_d_sq = sum(d * d for d in all_degrees(Y))
    return KumarBound(
        lower=mean_deg + s / math.sqrt(p - 1),
        upper=mean_deg + s * math.sqrt(p - 1),
        mean_deg=mean_deg,
        s=s,
        p=p,
        var_d=sum_d_sq / (2 * p) - mean_deg**2,
        wedge_term=motifs.wedges / p,
        butterfly_term=4 * motifs.butterflies / p,
        trace_a4=M,
        exact_identity=(n + m) % 2 == 0,
    )
