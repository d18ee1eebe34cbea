"""Item-popularity laws and random bipartite graphs realizing them.

Randomness comes from numpy's PCG64 seeded through ``SeedSequence``. Weight
draws use a single stream per spec seed. Graph realization spawns one child
stream per user row from ``SeedSequence([seed, 1, attempt])``, so rows can be filled
in any order (or in parallel) with identical results.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .graph import InteractionMatrix

KINDS = ("power_law", "log_normal", "exponential", "power_law_cutoff")
MAX_REALIZATION_RETRIES = 10


@dataclass(frozen=True)
class DistributionSpec:
    kind: str
    m: int
    params: dict = field(default_factory=dict)
    x_min: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DataError(f"unknown distribution {self.kind!r}; choose from {KINDS}")
        if self.m < 1:
            raise DataError("m must be >= 1")
        if self.x_min <= 0:
            raise DataError("x_min must be positive")
        p = self.params
        try:
            if self.kind in ("power_law", "power_law_cutoff") and not p["alpha"] > 1:
                raise DataError("power law needs alpha > 1")
            if self.kind == "log_normal":
                float(p["mu"])
                if not p["sigma"] > 0:
                    raise DataError("log-normal needs sigma > 0")
            if self.kind in ("exponential", "power_law_cutoff") and not p["rate"] > 0:
                raise DataError("rate must be positive")
        except KeyError as exc:
            raise DataError(f"{self.kind} is missing parameter {exc.args[0]!r}") from None

    @classmethod
    def parse(cls, text: str, m: int, seed: int = 0, x_min: float = 1.0) -> "DistributionSpec":
        """Parse ``kind:p1,p2`` such as ``power_law:1.5`` or ``log_normal:2.0,1.0``."""
        kind, _, args = text.partition(":")
        names = {
            "power_law": ("alpha",),
            "log_normal": ("mu", "sigma"),
            "exponential": ("rate",),
            "power_law_cutoff": ("alpha", "rate"),
        }.get(kind)
        if names is None:
            raise DataError(f"unknown distribution {kind!r}")
        values = [float(v) for v in args.split(",")] if args else []
        if len(values) != len(names):
            raise DataError(f"{kind} expects parameters {names}, got {values}")
        return cls(kind, m, dict(zip(names, values)), x_min=x_min, seed=seed)

    def label(self) -> str:
        return self.kind + ":" + ",".join(f"{v:g}" for v in self.params.values())


def _rng(seed: int, *stream) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *stream])))


def _power_law(rng, alpha, x_min, size):
    u = 1.0 - rng.random(size)  # (0, 1]
    return x_min * u ** (-1.0 / (alpha - 1.0))


def sample_item_weights(spec: DistributionSpec) -> np.ndarray:
    rng = _rng(spec.seed, 0)
    p, m, x_min = spec.params, spec.m, spec.x_min
    if spec.kind == "power_law":
        return _power_law(rng, p["alpha"], x_min, m)
    if spec.kind == "log_normal":
        return np.exp(rng.normal(p["mu"], p["sigma"], m))
    if spec.kind == "exponential":
        return x_min + rng.exponential(1.0 / p["rate"], m)
    # Power law with exponential cutoff: accept a pure power-law draw x with
    # probability exp(-rate * (x - x_min)).
    out = np.empty(m)
    filled = 0
    while filled < m:
        x = _power_law(rng, p["alpha"], x_min, 2 * (m - filled) + 16)
        keep = x[rng.random(len(x)) < np.exp(-p["rate"] * (x - x_min))]
        take = min(len(keep), m - filled)
        out[filled : filled + take] = keep[:take]
        filled += take
    return out


@dataclass(frozen=True)
class RealizationSpec:
    n_users: int
    model: str = "chung_lu"
    user_weight_law: DistributionSpec | None = None  # None means uniform
    target_density_cap: float = 1.0
    seed: int = 0
    target_edges: float | None = None  # rescale weights to this expected edge count

    def __post_init__(self):
        if self.n_users < 1:
            raise DataError("n_users must be >= 1")
        if self.model not in ("chung_lu", "configuration_dedup"):
            raise DataError(f"unknown model {self.model!r}")
        if not 0 < self.target_density_cap <= 1:
            raise DataError("target_density_cap must lie in (0, 1]")


def _user_weights(spec: RealizationSpec) -> np.ndarray:
    if spec.user_weight_law is None:
        return np.ones(spec.n_users)
    law = spec.user_weight_law
    if law.m != spec.n_users:
        law = DistributionSpec(law.kind, spec.n_users, law.params, law.x_min, law.seed)
    return sample_item_weights(law)


def edge_probabilities(item_weights, spec: RealizationSpec) -> np.ndarray:
    """Chung-Lu probabilities min(cap, v_u * w_i / W) with user weights rescaled to total W.

    When ``target_edges`` is set the item weights are scaled (by bisection) so
    the expected edge count matches it.
    """
    w = np.asarray(item_weights, dtype=float)
    if w.ndim != 1 or len(w) == 0 or np.any(w <= 0):
        raise DataError("item weights must be a nonempty positive sequence")
    v = _user_weights(spec)

    def probs(scale):
        ws = w * scale
        total = ws.sum()
        vs = v * (total / v.sum())
        return np.minimum(spec.target_density_cap, np.outer(vs, ws) / total)

    if spec.target_edges is None:
        return probs(1.0)
    cap_edges = spec.target_density_cap * spec.n_users * len(w)
    if not 0 < spec.target_edges < cap_edges:
        raise DataError(f"target_edges must lie in (0, {cap_edges})")
    lo, hi = 0.0, 1.0
    while probs(hi).sum() < spec.target_edges:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if probs(mid).sum() < spec.target_edges:
            lo = mid
        else:
            hi = mid
    return probs(hi)


def _chung_lu(prob: np.ndarray, seed: int, attempt: int) -> np.ndarray:
    n, m = prob.shape
    children = np.random.SeedSequence([seed, 1, attempt]).spawn(n)
    y = np.empty((n, m), dtype=np.uint8)
    for u, child in enumerate(children):
        y[u] = np.random.Generator(np.random.PCG64(child)).random(m) < prob[u]
    return y


def _configuration(item_weights, spec: RealizationSpec, attempt: int) -> np.ndarray:
    # Stub matching: integer stubs by stochastic rounding, duplicates collapsed.
    rng = _rng(spec.seed, 2, attempt)
    w = np.asarray(item_weights, dtype=float)
    n = spec.n_users
    if spec.target_edges is not None:
        w = w * (spec.target_edges / w.sum())
    w = np.minimum(w, n)
    item_stubs = np.floor(w + rng.random(len(w))).astype(np.int64)
    total = int(item_stubs.sum())
    v = _user_weights(spec)
    user_p = v / v.sum()
    users = rng.choice(n, size=total, p=user_p)
    items = np.repeat(np.arange(len(w)), item_stubs)
    y = np.zeros((n, len(w)), dtype=np.uint8)
    y[users, items] = 1
    return y


def realize_bipartite(item_weights, spec: RealizationSpec) -> InteractionMatrix:
    """Sample a binary matrix; all-zero draws are retried a bounded number of times."""
    if spec.model == "chung_lu":
        prob = edge_probabilities(item_weights, spec)
    for attempt in range(MAX_REALIZATION_RETRIES):
        if spec.model == "chung_lu":
            y = _chung_lu(prob, spec.seed, attempt)
        else:
            y = _configuration(item_weights, spec, attempt)
        if y.any():
            return InteractionMatrix(y)
    raise DataError(f"realization produced no edges after {MAX_REALIZATION_RETRIES} attempts")


def rank_frequency(r) -> list[tuple[int, float]]:
    """(rank, frequency) pairs, frequency descending, zeros dropped, ranks 1-based."""
    vals = sorted((x for x in r if x != 0), reverse=True)
    return [(i + 1, v) for i, v in enumerate(vals)]


def curvature_statistic(values, lo_frac: float = 0.01, hi_frac: float = 0.9, points: int = 20) -> float:
    """Log-log curvature of a rank-frequency curve.

    log(frequency) is read off at ``points`` ranks spaced geometrically between
    ``lo_frac * m`` and ``hi_frac * m``, a quadratic is fit against log(rank),
    and twice its leading coefficient is returned in absolute value. A pure
    power law gives roughly zero; log-normal curves bend downward.
    """
    freq = np.sort(np.asarray(values, dtype=float))[::-1]
    freq = freq[freq > 0]
    m = len(freq)
    if m < 10:
        raise DataError("need at least 10 positive values")
    lo = max(1.0, lo_frac * m)
    hi = max(lo * 2, hi_frac * m)
    ranks = np.unique(np.round(np.geomspace(lo, min(hi, m), points)).astype(int))
    x = np.log(ranks)
    y = np.log(freq[ranks - 1])
    coef = np.polyfit(x, y, 2)
    return float(abs(2 * coef[0]))


def tail_sums(alpha: float, m: int, scale: float = 1.0) -> tuple[float, float]:
    """sum_{i<=m} scale*i^-alpha and the sum of squares, by direct summation."""
    i = np.arange(1, m + 1, dtype=float)
    f = scale * i ** (-alpha)
    return float(f.sum()), float((f * f).sum())


def matched_pair(
    laws: tuple[DistributionSpec, DistributionSpec], n_users: int, seed: int
) -> tuple[InteractionMatrix, InteractionMatrix]:
    """Realize two laws on graphs with the same n, m and (expected) edge count.

    The first graph is drawn as-is; the second has its weights rescaled so its
    expected edge count equals the first graph's realized count.
    """
    first, second = laws
    w1 = sample_item_weights(first)
    Y1 = realize_bipartite(w1, RealizationSpec(n_users, seed=seed))
    w2 = sample_item_weights(second)
    Y2 = realize_bipartite(
        w2, RealizationSpec(n_users, seed=seed + 1, target_edges=float(Y1.e))
    )
    return Y1, Y2


def expected_item_degrees(item_weights, spec: RealizationSpec) -> np.ndarray:
    return edge_probabilities(item_weights, spec).sum(axis=0)
