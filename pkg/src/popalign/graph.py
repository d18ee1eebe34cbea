"""Bipartite interaction graph: degrees, volumes, wedges, butterflies, tr(A^4).

All combinatorial counts are returned as Python ints so identities such as
``tr(A^4) = 2e + 4W + 8c4`` hold exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError, InvalidSubsetError


@dataclass(frozen=True, eq=False)
class InteractionMatrix:
    """Binary n x m user-item biadjacency matrix.

    ``entries`` is stored as a read-only uint8 array. ``user_ids`` and
    ``item_ids`` keep the external labels when the matrix came from a file;
    ``duplicates`` counts collapsed repeated edges and ``binarized`` counts
    entries whose original value was not 0/1.
    """

    entries: np.ndarray
    user_ids: tuple = field(default=())
    item_ids: tuple = field(default=())
    duplicates: int = 0
    binarized: int = 0

    def __post_init__(self):
        arr = np.asarray(self.entries)
        if arr.ndim != 2:
            raise DataError(f"interaction matrix must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise DataError("interaction matrix needs at least one user")
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise DataError("interaction matrix entries must be 0 or 1")
        arr = np.ascontiguousarray(arr, dtype=np.uint8)
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        if not self.user_ids:
            object.__setattr__(self, "user_ids", tuple(str(u) for u in range(arr.shape[0])))
        if not self.item_ids:
            object.__setattr__(self, "item_ids", tuple(str(i) for i in range(arr.shape[1])))
        if len(self.user_ids) != arr.shape[0] or len(self.item_ids) != arr.shape[1]:
            raise DataError("id labels do not match matrix shape")

    @classmethod
    def from_dense(cls, rows) -> "InteractionMatrix":
        return cls(np.asarray(rows))

    @classmethod
    def from_edges(cls, n: int, m: int, edges: Iterable[tuple[int, int]]) -> "InteractionMatrix":
        """Build from 0-based (user, item) pairs; repeated pairs are collapsed."""
        y = np.zeros((n, m), dtype=np.uint8)
        dup = 0
        for u, i in edges:
            if not (0 <= u < n and 0 <= i < m):
                raise DataError(f"edge ({u}, {i}) outside {n}x{m}")
            if y[u, i]:
                dup += 1
            y[u, i] = 1
        return cls(y, duplicates=dup)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def m(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def e(self) -> int:
        return int(self.entries.sum(dtype=np.int64))

    def as_float(self) -> np.ndarray:
        return self.entries.astype(np.float64)

    def item_degrees(self) -> np.ndarray:
        return self.entries.sum(axis=0, dtype=np.int64)

    def user_degrees(self) -> np.ndarray:
        return self.entries.sum(axis=1, dtype=np.int64)

    def drop_zero_items(self) -> "InteractionMatrix":
        keep = np.flatnonzero(self.item_degrees() > 0)
        return InteractionMatrix(
            self.entries[:, keep],
            user_ids=self.user_ids,
            item_ids=tuple(self.item_ids[i] for i in keep),
            duplicates=self.duplicates,
            binarized=self.binarized,
        )


@dataclass(frozen=True)
class DegreeSummary:
    r: tuple[int, ...]
    d_user: tuple[int, ...]
    vol1_items: int
    vol2_items: int
    r_max: int
    d_bar: Fraction
    d_tilde_items: Fraction | None  # undefined for an edgeless graph


@dataclass(frozen=True)
class MotifCounts:
    wedges: int
    butterflies: int
    trace_a4: int


def degree_summary(Y: InteractionMatrix) -> DegreeSummary:
    r = [int(x) for x in Y.item_degrees()]
    d = [int(x) for x in Y.user_degrees()]
    vol1 = sum(r)
    vol2 = sum(x * x for x in r)
    return DegreeSummary(
        r=tuple(r),
        d_user=tuple(d),
        vol1_items=vol1,
        vol2_items=vol2,
        r_max=max(r, default=0),
        d_bar=Fraction(2 * vol1, Y.n + Y.m),
        d_tilde_items=Fraction(vol2, vol1) if vol1 else None,
    )


def all_degrees(Y: InteractionMatrix) -> list[int]:
    """Degrees of all n + m vertices, users first."""
    return [int(x) for x in Y.user_degrees()] + [int(x) for x in Y.item_degrees()]


def volume(Y: InteractionMatrix, vertices: Sequence[int] | None = None, power: int = 1) -> int:
    """vol_k(S) = sum of degree**power over a vertex set.

    Vertices are indexed 0..n-1 for users and n..n+m-1 for items; ``None``
    means the whole vertex set.
    """
    deg = all_degrees(Y)
    if vertices is None:
        vertices = range(len(deg))
    total = 0
    for v in vertices:
        if not 0 <= v < len(deg):
            raise InvalidSubsetError(f"vertex {v} out of range")
        total += deg[v] ** power
    return total


def wedge_count(Y: InteractionMatrix) -> int:
    return sum(d * (d - 1) // 2 for d in all_degrees(Y))


def _pair_codegree_butterflies(y: np.ndarray) -> int:
    # Rows of y are the side whose pairs we enumerate.
    if y.shape[0] < 2:
        return 0
    yi = y.astype(np.int64)
    gram = yi @ yi.T
    iu = np.triu_indices(gram.shape[0], k=1)
    c = gram[iu]
    return int(sum(int(x) for x in (c * (c - 1) // 2)))


def butterfly_count(Y: InteractionMatrix) -> int:
    """Number of 4-cycles, via co-degrees over the smaller side of the bipartition."""
    y = Y.entries
    if y.shape[0] <= y.shape[1]:
        return _pair_codegree_butterflies(y)
    return _pair_codegree_butterflies(y.T)


def butterfly_count_by_side(Y: InteractionMatrix, side: str) -> int:
    """Co-degree butterfly count over a chosen side ('users' or 'items')."""
    if side == "users":
        return _pair_codegree_butterflies(Y.entries)
    if side == "items":
        return _pair_codegree_butterflies(Y.entries.T)
    raise DataError(f"unknown side {side!r}")


def motif_counts(Y: InteractionMatrix) -> MotifCounts:
    w = wedge_count(Y)
    c4 = butterfly_count(Y)
    return MotifCounts(wedges=w, butterflies=c4, trace_a4=2 * Y.e + 4 * w + 8 * c4)


def trace_a4(Y: InteractionMatrix) -> int:
    return motif_counts(Y).trace_a4


def _normalize_subset(S: Iterable[int], m: int) -> list[int]:
    idx = sorted({int(s) for s in S})
    if not idx:
        raise InvalidSubsetError("item subset must be nonempty")
    if idx[0] < 0 or idx[-1] >= m:
        raise InvalidSubsetError(f"item subset {idx} out of range for m={m}")
    return idx


def complement(S: Iterable[int], m: int) -> list[int]:
    chosen = set(_normalize_subset(S, m))
    return [i for i in range(m) if i not in chosen]


def remove_columns(Y: InteractionMatrix, S: Iterable[int]) -> InteractionMatrix:
    """B_S: Y without the columns in S (0-based), complement order preserved."""
    keep = complement(S, Y.m)
    return InteractionMatrix(
        Y.entries[:, keep],
        user_ids=Y.user_ids,
        item_ids=tuple(Y.item_ids[i] for i in keep),
    )
