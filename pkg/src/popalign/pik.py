"""Two-sided bounds on cos(theta_k) built from an item subset S.

tau_S = trace of the S x S block of Pi_k is bracketed first (row-sum bound,
Ky Fan sums, or interlacing), then the block decomposition of r' Pi_k r turns
the bracket into bounds on cos(theta_k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import DataError, InvalidSubsetError
from .graph import InteractionMatrix, _normalize_subset
from .spectral import SpectralDecomposition

LOWER_BOUNDS = ("A1", "A2", "B1", "B2", "B3b1", "B3b2")
UPPER_BOUNDS = ("C1", "C2", "C3")


@dataclass(frozen=True, eq=False)
class SubsetContext:
    S: tuple[int, ...]
    k: int
    n: int
    r_S_norm_sq: float
    r_Sc_norm_sq: float
    delta_S: int
    H_k: float
    bs_gram_eigs: np.ndarray  # nonzero-capable spectrum of B_S'B_S, nonincreasing
    bs_user_eigs: np.ndarray  # full n x n spectrum of B_S B_S', nonincreasing
    sigma_sq: np.ndarray  # squared singular values of Y, length min(n, m)
    vol2: int

    @property
    def size(self) -> int:
        return len(self.S)

    @property
    def norm_S(self) -> float:
        return math.sqrt(self.r_S_norm_sq)

    @property
    def norm_Sc(self) -> float:
        return math.sqrt(self.r_Sc_norm_sq)

    def sigma_sq_at(self, j: int) -> float:
        """sigma_j^2 for 1-based j, zero past the end of the spectrum."""
        return float(self.sigma_sq[j - 1]) if 1 <= j <= len(self.sigma_sq) else 0.0


def gram_spectra(B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Spectra of B'B and BB' from one eigendecomposition of the smaller Gram form."""
    n, c = B.shape
    if c == 0:
        return np.zeros(0), np.zeros(n)
    small = B.T @ B if c <= n else B @ B.T
    ev = np.clip(np.linalg.eigvalsh(small)[::-1], 0.0, None)
    col = np.zeros(c)
    usr = np.zeros(n)
    col[: min(c, len(ev))] = ev[:c]
    usr[: min(n, len(ev))] = ev[:n]
    return col, usr


def subset_context(
    Y: InteractionMatrix, D: SpectralDecomposition, S: Iterable[int], k: int
) -> SubsetContext:
    D.require_rank(k)
    idx = _normalize_subset(S, Y.m)
    y = Y.as_float()
    r = y.sum(axis=0)
    mask = np.zeros(Y.m, dtype=bool)
    mask[idx] = True
    col_eigs, user_eigs = gram_spectra(y[:, ~mask])
    r_int = Y.item_degrees()
    return SubsetContext(
        S=tuple(idx),
        k=k,
        n=Y.n,
        r_S_norm_sq=float(r[mask] @ r[mask]),
        r_Sc_norm_sq=float(r[~mask] @ r[~mask]),
        delta_S=int(r_int.sum() - r_int[mask].sum()),
        H_k=float(np.sum(1.0 / D.sigma_sq[:k])),
        bs_gram_eigs=col_eigs,
        bs_user_eigs=user_eigs,
        sigma_sq=D.sigma_sq.copy(),
        vol2=int((r_int**2).sum()),
    )


def tau_lower_rowsum(ctx: SubsetContext) -> float:
    """k - Delta_S * H_k (may be negative)."""
    return ctx.k - ctx.delta_S * ctx.H_k


def tau_bounds_kyfan(ctx: SubsetContext) -> tuple[float, float]:
    """Ky Fan bracket on tau_S.

    The lower side uses the k largest eigenvalues of B_S'B_S scaled by
    1/sigma_k^2; the upper side the k smallest eigenvalues of the n x n form
    B_S B_S' (zeros included) scaled by 1/sigma_1^2.
    """
    k = ctx.k
    top = ctx.bs_gram_eigs[:k].sum()
    bottom = np.sort(ctx.bs_user_eigs)[:k].sum()
    lower = k - top / ctx.sigma_sq_at(k)
    upper = k - bottom / ctx.sigma_sq_at(1)
    return float(lower), float(upper)


def tau_bounds_interlacing(ctx: SubsetContext) -> tuple[float, float]:
    """Basis-free bracket: Gram eigenvalues replaced by interlacing limits on sigma_j^2."""
    k, n, size = ctx.k, ctx.n, ctx.size
    top = sum(ctx.sigma_sq_at(j) for j in range(1, k + 1))
    bottom = sum(ctx.sigma_sq_at(j + size) for j in range(n - k + 1, n + 1) if j + size <= n)
    lower = k - top / ctx.sigma_sq_at(k)
    upper = k - bottom / ctx.sigma_sq_at(1)
    return float(lower), float(upper)


def quadratic_bracket(L_tau: float, U_tau: float, ctx: SubsetContext) -> tuple[float, float]:
    """Bounds on the quadratic form r' Pi_k r from a bracket L_tau <= tau_S <= U_tau."""
    if L_tau > U_tau:
        raise DataError(f"L_tau={L_tau} exceeds U_tau={U_tau}")
    a, b = ctx.norm_S, ctx.norm_Sc
    lam_min = max(0.0, L_tau - (ctx.size - 1))
    lower = max(0.0, lam_min * a * a - 2 * a * b)
    upper = min(1.0, U_tau) * a * a + 2 * a * b + b * b
    return lower, upper


def _quad_lower(lam_min: float, ctx: SubsetContext) -> float:
    a, b = ctx.norm_S, ctx.norm_Sc
    return max(0.0, lam_min * a * a - 2 * a * b)


def _quad_upper(lam_max: float, ctx: SubsetContext) -> float:
    a, b = ctx.norm_S, ctx.norm_Sc
    return lam_max * a * a + 2 * a * b + b * b


def _to_cos(quad: float, vol2: float) -> float:
    return min(1.0, math.sqrt(max(0.0, quad) / vol2))


def principal_block(D: SpectralDecomposition, S: Iterable[int], k: int) -> np.ndarray:
    """M_S = (Pi_k)_{SS}."""
    Qs = D.right_vectors[list(S), :k]
    return Qs @ Qs.T


def true_tau(D: SpectralDecomposition, S: Iterable[int], k: int) -> float:
    Qs = D.right_vectors[list(S), :k]
    return float(np.sum(Qs**2))


def _require_square(ctx: SubsetContext, which: str) -> None:
    if ctx.size != ctx.k:
        raise InvalidSubsetError(f"{which} requires |S| = k, got |S|={ctx.size}, k={ctx.k}")


def bound_family_lower(ctx: SubsetContext, which: str) -> float:
    """A1/A2 (row-sum), B1/B2 (Ky Fan), B3b1/B3b2 (interlacing) lower bounds on cos(theta_k)."""
    k, size = ctx.k, ctx.size
    if which in ("A1", "A2"):
        L = tau_lower_rowsum(ctx)
    elif which in ("B1", "B2"):
        L = tau_bounds_kyfan(ctx)[0]
    elif which in ("B3b1", "B3b2"):
        L = tau_bounds_interlacing(ctx)[0]
    else:
        raise DataError(f"unknown lower bound {which!r}")
    if which in ("A2", "B2", "B3b2"):
        _require_square(ctx, which)
        lam_min = max(0.0, L - (k - 1))
    else:
        lam_min = max(0.0, L - (size - 1))
    return _to_cos(_quad_lower(lam_min, ctx), ctx.vol2)


def bound_family_upper(ctx: SubsetContext, which: str, D: SpectralDecomposition | None = None) -> float:
    """C1 (exact lambda_1(M_S)), C2 (Ky Fan), C3 (interlacing) upper bounds on cos(theta_k)."""
    if which == "C1":
        if D is None:
            raise DataError("C1 needs the spectral decomposition to form M_S")
        M = principal_block(D, ctx.S, ctx.k)
        lam = float(np.linalg.eigvalsh(M)[-1])
        lam_max = min(1.0, max(0.0, lam))
    elif which == "C2":
        lam_max = min(1.0, tau_bounds_kyfan(ctx)[1])
    elif which == "C3":
        lam_max = min(1.0, tau_bounds_interlacing(ctx)[1])
    else:
        raise DataError(f"unknown upper bound {which!r}")
    return _to_cos(_quad_upper(lam_max, ctx), ctx.vol2)


@dataclass(frozen=True)
class PikBoundSet:
    a1: float
    a2: float | None
    b1: float
    b2: float | None
    b3_from_b1: float
    b3_from_b2: float | None
    c1: float
    c2: float
    c3: float
    tau_lower_rowsum: float
    tau_lower_kyfan: float
    tau_upper_kyfan: float
    witnesses: dict = field(default_factory=dict)

    def lowers(self) -> dict:
        out = {"A1": self.a1, "B1": self.b1, "B3b1": self.b3_from_b1}
        if self.a2 is not None:
            out.update(A2=self.a2, B2=self.b2, B3b2=self.b3_from_b2)
        return out

    def uppers(self) -> dict:
        return {"C1": self.c1, "C2": self.c2, "C3": self.c3}


def pik_bounds(ctx: SubsetContext, D: SpectralDecomposition) -> PikBoundSet:
    square = ctx.size == ctx.k
    lo_kf, hi_kf = tau_bounds_kyfan(ctx)
    bottom_zero = float(np.sort(ctx.bs_user_eigs)[: ctx.k].sum()) == 0.0
    return PikBoundSet(
        a1=bound_family_lower(ctx, "A1"),
        a2=bound_family_lower(ctx, "A2") if square else None,
        b1=bound_family_lower(ctx, "B1"),
        b2=bound_family_lower(ctx, "B2") if square else None,
        b3_from_b1=bound_family_lower(ctx, "B3b1"),
        b3_from_b2=bound_family_lower(ctx, "B3b2") if square else None,
        c1=bound_family_upper(ctx, "C1", D),
        c2=bound_family_upper(ctx, "C2"),
        c3=bound_family_upper(ctx, "C3"),
        tau_lower_rowsum=tau_lower_rowsum(ctx),
        tau_lower_kyfan=lo_kf,
        tau_upper_kyfan=hi_kf,
        witnesses={
            "delta_S": ctx.delta_S,
            "H_k": ctx.H_k,
            "r_S_norm_sq": ctx.r_S_norm_sq,
            "r_Sc_norm_sq": ctx.r_Sc_norm_sq,
            "tau_S": true_tau(D, ctx.S, ctx.k),
            "c2_vacuous": bottom_zero,
        },
    )


def top_k_items(r, j: int) -> list[int]:
    """Indices (0-based) of the j largest entries of r, ties broken by lower index."""
    r = list(r)
    if not 1 <= j <= len(r):
        raise DataError(f"j={j} out of range 1..{len(r)}")
    order = sorted(range(len(r)), key=lambda i: (-r[i], i))
    return sorted(order[:j])
