"""SVD of the interaction matrix and the exact alignment of popularity with
the top-k right singular subspace."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DataError, DegeneracyError, InvariantViolation, RankError
from .graph import InteractionMatrix

# Relative gap under which two singular values count as equal.
MULTIPLICITY_RTOL = 1e-9
PERRON_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    sigma: np.ndarray  # length min(n, m), nonincreasing
    left_vectors: np.ndarray  # n x min(n, m)
    right_vectors: np.ndarray  # m x min(n, m)
    rank_tol: float
    effective_rank: int

    @property
    def sigma_sq(self) -> np.ndarray:
        return self.sigma**2

    def sigma1_multiplicity(self) -> int:
        if self.effective_rank == 0:
            return 0
        s1 = self.sigma[0]
        return int(np.sum(np.abs(self.sigma - s1) <= MULTIPLICITY_RTOL * s1))

    def padded_sigma_sq(self, length: int) -> np.ndarray:
        """Squared singular values padded with zeros (or truncated) to ``length``."""
        out = np.zeros(length)
        s = self.sigma_sq[:length]
        out[: len(s)] = s
        return out

    def require_rank(self, k: int) -> None:
        if k < 1 or k > self.effective_rank:
            raise RankError(k, self.effective_rank)


def _canonical_signs(P: np.ndarray, Q: np.ndarray) -> None:
    """Orient singular pairs in place: q_1 nonnegative, later q_i with largest |entry| positive."""
    for i in range(Q.shape[1]):
        q = Q[:, i]
        if i == 0:
            flip = q.sum() < 0
        else:
            j = int(np.argmax(np.abs(q)))
            flip = q[j] < 0
        if flip:
            Q[:, i] = -q
            P[:, i] = -P[:, i]


def svd(Y: InteractionMatrix, rank_tol: float | None = None) -> SpectralDecomposition:
    """Thin SVD with canonical orientation.

    ``rank_tol`` defaults to ``max(n, m) * eps * sigma_1``; singular values at
    or below it are treated as zero for rank purposes.
    """
    n, m = Y.shape
    r = min(n, m)
    if r == 0:
        return SpectralDecomposition(np.zeros(0), np.zeros((n, 0)), np.zeros((m, 0)), 0.0, 0)
    try:
        P, s, Qt = np.linalg.svd(Y.as_float(), full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"SVD did not converge for {n}x{m} matrix: {exc}") from exc
    Q = Qt.T.copy()
    P = P.copy()
    if rank_tol is None:
        rank_tol = max(n, m) * np.finfo(float).eps * (s[0] if len(s) else 0.0)
    if rank_tol < 0:
        raise DataError("rank_tol must be nonnegative")
    eff = int(np.sum(s > rank_tol))
    _canonical_signs(P, Q)
    for arr in (s, P, Q):
        arr.setflags(write=False)
    return SpectralDecomposition(s, P, Q, float(rank_tol), eff)


def principal_right_vector(D: SpectralDecomposition) -> np.ndarray:
    """Perron-oriented q_1 with tiny negative residue clamped to zero.

    Raises DegeneracyError when sigma_1 is repeated, since then no single
    orientation is canonical.
    """
    if D.effective_rank < 1:
        raise RankError(1, D.effective_rank)
    mult = D.sigma1_multiplicity()
    if mult > 1:
        raise DegeneracyError(mult)
    q = D.right_vectors[:, 0].copy()
    if q.sum() < 0:
        q = -q
    if q.min() < -PERRON_TOL:
        raise DegeneracyError(mult)
    return np.clip(q, 0.0, None)


def truncate(D: SpectralDecomposition, ell: int) -> np.ndarray:
    """Best rank-ell approximation sum_{k<=ell} sigma_k p_k q_k'."""
    if ell < 0 or ell > D.effective_rank:
        raise RankError(ell, D.effective_rank)
    P = D.left_vectors[:, :ell]
    Q = D.right_vectors[:, :ell]
    return (P * D.sigma[:ell]) @ Q.T


@dataclass(frozen=True, eq=False)
class AlignmentProfile:
    cos_theta: np.ndarray  # entry k-1 is cos(theta_k), k = 1..effective_rank
    kappa: np.ndarray
    mu_ratio: float
    alpha: np.ndarray  # c_i^2 / n for i = 1..min(n, m)
    kappa_spectral: np.ndarray

    def cos(self, k: int) -> float:
        return float(self.cos_theta[k - 1])


def alignment_profile(
    Y: InteractionMatrix, D: SpectralDecomposition, side: str = "items", atol: float = 1e-8
) -> AlignmentProfile:
    """cos(theta_k) for every k, computed by projection and cross-checked spectrally.

    ``side="users"`` gives the user-side analogue: s = Ye against the left
    singular vectors, with m in place of n.
    """
    y = Y.as_float()
    if side == "items":
        pop = y.sum(axis=0)
        basis, dual, count = D.right_vectors, D.left_vectors, Y.n
    elif side == "users":
        pop = y.sum(axis=1)
        basis, dual, count = D.left_vectors, D.right_vectors, Y.m
    else:
        raise DataError(f"unknown side {side!r}")
    norm_sq = float(pop @ pop)
    if norm_sq == 0:
        raise DataError("popularity vector is zero; the matrix has no edges")
    k_max = D.effective_rank
    proj = basis[:, :k_max].T @ pop
    kappa = np.cumsum(proj**2) / norm_sq

    c = dual.T @ np.ones(count)
    weights = D.sigma_sq * c**2
    kappa_spec = np.cumsum(weights[:k_max]) / weights.sum()
    if np.max(np.abs(kappa - kappa_spec), initial=0.0) > atol:
        raise InvariantViolation("projector and spectral forms of kappa disagree")
    kappa = np.minimum(kappa, 1.0)
    return AlignmentProfile(
        cos_theta=np.sqrt(kappa),
        kappa=kappa,
        mu_ratio=norm_sq / count,
        alpha=c**2 / count,
        kappa_spectral=kappa_spec,
    )


def projector(D: SpectralDecomposition, k: int) -> np.ndarray:
    """Pi_k = Q_k Q_k' on the item space."""
    D.require_rank(k)
    Q = D.right_vectors[:, :k]
    return Q @ Q.T
