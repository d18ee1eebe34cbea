"""Readers and writers for edge lists and MatrixMarket coordinate files."""

from __future__ import annotations

import csv
import io
from typing import IO, Iterable

import numpy as np

from .errors import DataError
from .graph import InteractionMatrix

SEPARATORS = {"csv": ",", "tsv": "\t"}
_HEADER_TOKENS = ("user", "item", "uid", "iid")


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def _looks_like_header(first: list[str], second: list[str] | None) -> bool:
    # ids are arbitrary strings, so a non-numeric first row alone is not enough:
    # either the columns are named like user/item, or the data below is numeric.
    fields = [f.strip().lower() for f in first[:2]]
    if all(any(tok in f for tok in _HEADER_TOKENS) for f in fields):
        return True
    if any(not _is_number(f) for f in fields) and second is not None:
        return all(_is_number(f.strip()) for f in second[:2])
    return False


def parse_edge_list(stream: IO[str] | str, fmt: str = "csv") -> InteractionMatrix:
    """Read ``user<sep>item`` rows into a binary matrix.

    Ids are mapped to dense indices in order of first appearance. Extra
    columns are ignored; blank lines and ``#`` comments are skipped.
    """
    if fmt not in SEPARATORS:
        raise DataError(f"unknown edge-list format {fmt!r}")
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    rows = []
    for lineno, row in enumerate(csv.reader(stream, delimiter=SEPARATORS[fmt]), start=1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        rows.append((lineno, row))
    if not rows:
        raise DataError("edge list is empty")
    if _looks_like_header(rows[0][1], rows[1][1] if len(rows) > 1 else None):
        rows = rows[1:]
        if not rows:
            raise DataError("edge list has a header but no edges")

    users: dict[str, int] = {}
    items: dict[str, int] = {}
    edges = []
    for lineno, row in rows:
        if len(row) < 2 or not row[0].strip() or not row[1].strip():
            raise DataError(f"expected 'user{SEPARATORS[fmt]}item', got {row!r}", line=lineno)
        u = users.setdefault(row[0].strip(), len(users))
        i = items.setdefault(row[1].strip(), len(items))
        edges.append((u, i))
    y = np.zeros((len(users), len(items)), dtype=np.uint8)
    uu, ii = np.array(edges).T
    y[uu, ii] = 1
    duplicates = len(edges) - int(y.sum())
    return InteractionMatrix(
        y, user_ids=tuple(users), item_ids=tuple(items), duplicates=duplicates
    )


def parse_matrix_market(stream: IO[str] | str) -> InteractionMatrix:
    """Read a coordinate MatrixMarket file (pattern, integer or real field, general symmetry)."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    lines = iter(enumerate(stream, start=1))
    try:
        lineno, banner = next(lines)
    except StopIteration:
        raise DataError("empty MatrixMarket input") from None
    parts = banner.lower().split()
    if len(parts) != 5 or parts[0] != "%%matrixmarket" or parts[1:3] != ["matrix", "coordinate"]:
        raise DataError(f"not a MatrixMarket coordinate banner: {banner.strip()!r}", line=lineno)
    field_type, symmetry = parts[3], parts[4]
    if field_type not in ("pattern", "integer", "real"):
        raise DataError(f"unsupported field type {field_type!r}", line=lineno)
    if symmetry != "general":
        raise DataError(f"unsupported symmetry {symmetry!r}", line=lineno)

    size = None
    for lineno, line in lines:
        if line.startswith("%") or not line.strip():
            continue
        size = line.split()
        break
    if size is None or len(size) != 3:
        raise DataError("missing size line 'rows cols entries'")
    try:
        n, m, nnz = (int(x) for x in size)
    except ValueError:
        raise DataError(f"bad size line {' '.join(size)!r}", line=lineno) from None
    if n < 1 or m < 1:
        raise DataError(f"matrix must be at least 1x1, got {n}x{m}", line=lineno)

    y = np.zeros((n, m), dtype=np.uint8)
    seen = binarized = duplicates = 0
    want = 2 if field_type == "pattern" else 3
    for lineno, line in lines:
        if line.startswith("%") or not line.strip():
            continue
        tok = line.split()
        if len(tok) != want:
            raise DataError(f"expected {want} fields, got {len(tok)}", line=lineno)
        try:
            u, i = int(tok[0]), int(tok[1])
            value = 1.0 if field_type == "pattern" else float(tok[2])
        except ValueError:
            raise DataError(f"unparsable entry {line.strip()!r}", line=lineno) from None
        if not (1 <= u <= n and 1 <= i <= m):
            raise DataError(f"index ({u}, {i}) outside declared {n}x{m}", line=lineno)
        seen += 1
        if value == 0:
            continue
        if value != 1:
            binarized += 1
        if y[u - 1, i - 1]:
            duplicates += 1
        y[u - 1, i - 1] = 1
    if seen != nnz:
        raise DataError(f"header declares {nnz} entries, found {seen}")
    return InteractionMatrix(y, duplicates=duplicates, binarized=binarized)


def read_matrix(path: str, fmt: str) -> InteractionMatrix:
    with open(path, encoding="utf-8", newline="") as fh:
        if fmt == "mm":
            return parse_matrix_market(fh)
        return parse_edge_list(fh, fmt)


def iter_edges(Y: InteractionMatrix) -> Iterable[tuple[str, str]]:
    for u, i in zip(*np.nonzero(Y.entries)):
        yield Y.user_ids[u], Y.item_ids[i]


def write_edge_list(Y: InteractionMatrix, stream: IO[str], fmt: str = "csv") -> None:
    writer = csv.writer(stream, delimiter=SEPARATORS[fmt], lineterminator="\n")
    writer.writerow(["user", "item"])
    writer.writerows(iter_edges(Y))


def write_matrix_market(Y: InteractionMatrix, stream: IO[str]) -> None:
    stream.write("%%MatrixMarket matrix coordinate pattern general\n")
    rows, cols = np.nonzero(Y.entries)
    stream.write(f"{Y.n} {Y.m} {len(rows)}\n")
    for u, i in zip(rows, cols):
        stream.write(f"{u + 1} {i + 1}\n")
